#pragma once

#include <memory>
#include <string>

#include "bitewatch/pipeline.hpp"

namespace bitewatch::io {

struct ServiceOptions {
  DetectorParams params;  // defaults for /detections when the query omits them
  SmoothingSpec smoothing;
  std::size_t default_buckets = 500;  // signal decimation
  double excerpt_pad_s = 5.0;         // signal context around a conflict
};

// HTTP API under /v1 for the adjudication UI:
//   GET  /v1/courses
//   GET  /v1/courses/{id}/signal?channel=roll&smoothed=true&buckets=N&start=&end=
//   GET  /v1/courses/{id}/labels?rater=<rater_id>|merged
//   GET  /v1/courses/{id}/groundtruth
//   GET  /v1/courses/{id}/detections?t1=&t2=&t3=&t4=
//   GET  /v1/conflicts?status=open|resolved|all&course=<id>
//   POST /v1/conflicts/{id}/decision
// Reads take a shared lock over the workbench and POSTs an exclusive one, so
// every response reflects a single prefix of the decision log. Errors are
// JSON {"error": <code>, "message": <text>}.
class Service {
 public:
  Service(Workbench bench, ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Blocks until stop(). Returns false if the address cannot be bound.
  bool listen(const std::string& host, int port);
  // Binds to an ephemeral port and returns it (or -1); serve with
  // listen_after_bind() on another thread.
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();
  void stop();
  bool is_running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Loads the manifest and serves until the process is stopped. `address` is
// "host:port".
bool serve(const fs::path& manifest, const std::string& address, ServiceOptions options = {});

}  // namespace bitewatch::io
