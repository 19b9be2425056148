#include "bitewatch/service.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <map>
#include <shared_mutex>

#include <httplib.h>

#include "json_codec.hpp"

namespace bitewatch::io {
namespace {

using codec::exact;
using codec::fixed3;
using codec::json_string;

struct HttpError {
  int status;
  std::string code;
  std::string message;
};

void send_json(httplib::Response& res, int status, std::string body) {
  res.status = status;
  res.set_content(std::move(body), "application/json");
}

void send_error(httplib::Response& res, const HttpError& e) {
  send_json(res, e.status, fmt::format(R"({{"error":{},"message":{}}})", json_string(e.code), json_string(e.message)));
}

std::optional<double> query_number(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  const auto s = req.get_param_value(key);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw HttpError{400, "invalid_query", fmt::format("query parameter {}=\"{}\" is not a number", key, s)};
  }
  return v;
}

int channel_index(const std::string& name) {
  static const std::map<std::string, int> kChannels = {{"roll", 0}, {"gx", 0}, {"pitch", 1}, {"gy", 1},
                                                       {"yaw", 2},  {"gz", 2}, {"ax", 3},    {"ay", 4},
                                                       {"az", 5}};
  auto it = kChannels.find(name);
  if (it == kChannels.end()) {
    throw HttpError{400, "invalid_channel", fmt::format("unknown channel \"{}\"", name)};
  }
  return it->second;
}

double channel_value(const MotionSample& s, int channel) {
  return channel < 3 ? s.gyro[static_cast<std::size_t>(channel)] : s.accel[static_cast<std::size_t>(channel - 3)];
}

std::string labels_array(std::span<const BiteLabel> labels) {
  std::string out = "[";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += ",";
    out += codec::label_object(labels[i]);
  }
  return out + "]";
}

}  // namespace

struct Service::Impl {
  Impl(Workbench b, ServiceOptions o) : bench(std::move(b)), options(std::move(o)) {
    for (const auto& c : bench.dataset().courses) {
      // Invalid traces are served raw; their anomalies are listed in /courses.
      smoothed.emplace(c.entry.course_id, c.anomalies.empty() ? smooth(c.trace, options.smoothing) : c.trace);
    }
    install_routes();
  }

  Workbench bench;
  ServiceOptions options;
  std::map<std::string, MotionTrace, std::less<>> smoothed;  // immutable after construction
  mutable std::shared_mutex mutex;
  httplib::Server server;

  const CourseData& course_or_404(const std::string& id) const {
    const CourseData* c = bench.dataset().find_course(id);
    if (!c) throw HttpError{404, "unknown_course", fmt::format("no course \"{}\"", id)};
    return *c;
  }

  std::string courses_json() const {
    std::string out = "[";
    const auto& ds = bench.dataset();
    for (std::size_t i = 0; i < ds.courses.size(); ++i) {
      const auto& c = ds.courses[i];
      std::vector<std::string> raters;
      for (const auto& labels : c.raters) raters.push_back(labels.empty() ? "" : labels.front().rater_id);
      std::string anomalies = "[";
      for (std::size_t k = 0; k < c.anomalies.size(); ++k) {
        anomalies += fmt::format(R"({}{{"kind":"{}","index":{},"detail":{}}})", k ? "," : "",
                                 to_string(c.anomalies[k].kind), c.anomalies[k].index, json_string(c.anomalies[k].detail));
      }
      anomalies += "]";
      out += fmt::format(
          R"({}{{"course_id":{},"participant_id":{},"motion":{},"labels":{},"menu":{},"raters":{},"samples":{},"duration_s":{},"anomalies":{}}})",
          i ? "," : "", json_string(c.entry.course_id), json_string(c.entry.participant_id), json_string(c.entry.motion),
          codec::json(c.entry.labels).dump(), codec::json(c.entry.menu).dump(), codec::json(raters).dump(),
          c.trace.size(), fixed3(c.trace.duration()), anomalies);
    }
    return out + "]";
  }

  std::string signal_json(const std::string& id, const httplib::Request& req) const {
    const auto& course = course_or_404(id);
    const std::string channel_name = req.has_param("channel") ? req.get_param_value("channel") : "roll";
    const int channel = channel_index(channel_name);
    const bool use_smoothed = !req.has_param("smoothed") || req.get_param_value("smoothed") != "false";
    const MotionTrace& trace = use_smoothed ? smoothed.find(id)->second : course.trace;

    const double first = trace.empty() ? 0.0 : trace.samples.front().t;
    const double last = trace.empty() ? 0.0 : trace.samples.back().t;
    const double start = query_number(req, "start").value_or(first);
    const double end = query_number(req, "end").value_or(last);
    const auto buckets_q = query_number(req, "buckets");
    const auto buckets = buckets_q ? static_cast<long>(*buckets_q) : static_cast<long>(options.default_buckets);
    if (buckets < 1 || buckets > 100000) throw HttpError{400, "invalid_query", "buckets must be in [1, 100000]"};
    if (end < start) throw HttpError{400, "invalid_query", "end precedes start"};

    // min/max per equal-width time bucket; empty buckets are omitted.
    const double width = end > start ? (end - start) / static_cast<double>(buckets) : 1.0;
    std::string ts, mins, maxs;
    long current = -1;
    double lo = 0.0, hi = 0.0;
    auto flush = [&] {
      if (current < 0) return;
      const char* sep = ts.empty() ? "" : ",";
      ts += sep + fixed3(start + static_cast<double>(current) * width);
      mins += sep + exact(lo);
      maxs += sep + exact(hi);
    };
    for (const auto& s : trace.samples) {
      if (s.t < start || s.t > end) continue;
      const long b = std::min(buckets - 1, static_cast<long>((s.t - start) / width));
      const double v = channel_value(s, channel);
      if (b != current) {
        flush();
        current = b;
        lo = hi = v;
      } else {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    flush();
    return fmt::format(R"({{"course_id":{},"channel":{},"smoothed":{},"start":{},"end":{},"t":[{}],"min":[{}],"max":[{}]}})",
                       json_string(id), json_string(channel_name), use_smoothed ? "true" : "false", fixed3(start), fixed3(end), ts,
                       mins, maxs);
  }

  std::string labels_json(const std::string& id, const httplib::Request& req) const {
    const auto& course = course_or_404(id);
    const std::string rater = req.has_param("rater") ? req.get_param_value("rater") : "";
    if (rater == kMergedRater) {
      return fmt::format(R"({{"course_id":{},"rater":"merged","labels":{}}})", json_string(id),
                         labels_array(bench.ground_truth(id).bites));
    }
    std::string out = fmt::format(R"({{"course_id":{},"raters":[)", json_string(id));
    bool any = false;
    for (const auto& labels : course.raters) {
      const std::string rid = labels.empty() ? "" : labels.front().rater_id;
      if (!rater.empty() && rid != rater) continue;
      out += fmt::format(R"({}{{"rater":{},"labels":{}}})", any ? "," : "", json_string(rid), labels_array(labels));
      any = true;
    }
    if (!rater.empty() && !any) {
      throw HttpError{404, "unknown_rater", fmt::format("course \"{}\" has no rater \"{}\"", id, rater)};
    }
    return out + "]}";
  }

  std::string detections_json(const std::string& id, const httplib::Request& req) const {
    const auto& course = course_or_404(id);
    if (!course.anomalies.empty()) {
      throw HttpError{422, "invalid_trace", TraceValidationError(course.anomalies).what()};
    }
    DetectorParams p = options.params;
    p.t1 = query_number(req, "t1").value_or(p.t1);
    p.t2 = query_number(req, "t2").value_or(p.t2);
    p.t3 = query_number(req, "t3").value_or(p.t3);
    p.t4 = query_number(req, "t4").value_or(p.t4);
    try {
      p.check();
    } catch (const ContractViolation& e) {
      throw HttpError{400, "invalid_params", e.what()};
    }
    const MotionTrace& trace = smoothed.find(id)->second;
    const auto dets = detect_roll(trace.times(), trace.roll(), p);
    std::string ts;
    for (const auto& d : dets) ts += (ts.empty() ? "" : ",") + fixed3(d.t);
    return fmt::format(R"({{"course_id":{},"params":{},"t":[{}]}})", json_string(id), codec::params_object(p), ts);
  }

  std::string conflict_entry(const Conflict& c) const {
    const Adjudication* d = bench.decision_for(c.id);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& side : {c.a, c.b}) {
      if (!side) continue;
      lo = std::min(lo, side->t);
      hi = std::max(hi, side->t);
    }
    const double t0 = std::max(0.0, lo - options.excerpt_pad_s);
    const double t1 = hi + options.excerpt_pad_s;
    const std::string excerpt = fmt::format(
        R"("excerpt":{{"t_start":{},"t_end":{},"href":"/v1/courses/{}/signal?channel=roll&smoothed=true&start={}&end={}"}})",
        fixed3(t0), fixed3(t1), httplib::detail::encode_url(c.course_id), fixed3(t0), fixed3(t1));
    const std::string extra = fmt::format(R"(,"status":"{}","decision":{},{})", d ? "resolved" : "open",
                                          d ? format_decision_line(*d) : "null", excerpt);
    return codec::conflict_object(c, extra);
  }

  std::string conflicts_json(const httplib::Request& req) const {
    const std::string status = req.has_param("status") ? req.get_param_value("status") : "all";
    if (status != "open" && status != "resolved" && status != "all") {
      throw HttpError{400, "invalid_query", "status must be open, resolved or all"};
    }
    const std::string course = req.has_param("course") ? req.get_param_value("course") : "";
    std::string out = "[";
    bool any = false;
    for (const auto& c : bench.conflicts()) {
      if (!course.empty() && c.course_id != course) continue;
      const bool resolved = bench.decision_for(c.id) != nullptr;
      if ((status == "open" && resolved) || (status == "resolved" && !resolved)) continue;
      out += any ? "," : "";
      out += conflict_entry(c);
      any = true;
    }
    return out + "]";
  }

  std::string post_decision(const std::string& conflict_id, const std::string& body) {
    codec::json j;
    try {
      j = codec::json::parse(body);
    } catch (const codec::json::parse_error& e) {
      throw HttpError{400, "malformed_json", e.what()};
    }
    if (!j.is_object()) throw HttpError{400, "malformed_json", "decision body must be a JSON object"};
    if (j.contains("conflict_id") && j["conflict_id"] != conflict_id) {
      throw HttpError{400, "conflict_id_mismatch", "body conflict_id differs from the URL"};
    }
    j["conflict_id"] = conflict_id;
    Adjudication decision;
    try {
      decision = codec::decision_from_json(j);
    } catch (const EnumError& e) {
      throw HttpError{400, "invalid_enum", e.what()};
    } catch (const DataError& e) {
      throw HttpError{400, "invalid_decision", e.what()};
    }

    std::unique_lock lock(mutex);
    try {
      bench.add_decision(decision);
    } catch (const UnknownConflictError& e) {
      throw HttpError{404, "unknown_conflict", e.what()};
    } catch (const DuplicateDecisionError& e) {
      throw HttpError{409, "duplicate_decision", e.what()};
    } catch (const InvalidResolutionError& e) {
      throw HttpError{422, "inapplicable_resolution", e.what()};
    }
    return format_decision_line(decision);
  }

  template <typename F>
  static void guarded(httplib::Response& res, F&& body) {
    try {
      body();
    } catch (const HttpError& e) {
      send_error(res, e);
    } catch (const std::exception& e) {
      send_error(res, HttpError{500, "internal", e.what()});
    }
  }

  template <typename F>
  void get(const std::string& pattern, F handler) {
    server.Get(pattern, [this, handler](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        std::shared_lock lock(mutex);
        send_json(res, 200, handler(req));
      });
    });
  }

  void install_routes() {
    get("/v1/courses", [this](const httplib::Request&) { return courses_json(); });
    get(R"(/v1/courses/([^/]+)/signal)",
        [this](const httplib::Request& req) { return signal_json(req.matches[1], req); });
    get(R"(/v1/courses/([^/]+)/labels)",
        [this](const httplib::Request& req) { return labels_json(req.matches[1], req); });
    get(R"(/v1/courses/([^/]+)/groundtruth)", [this](const httplib::Request& req) {
      const std::string id = req.matches[1];
      course_or_404(id);
      const auto blocked = bench.blocked_courses();
      const bool is_blocked = std::find(blocked.begin(), blocked.end(), id) != blocked.end();
      return fmt::format(R"({{"course_id":{},"blocked":{},"bites":{}}})", json_string(id), is_blocked ? "true" : "false",
                         labels_array(bench.ground_truth(id).bites));
    });
    get(R"(/v1/courses/([^/]+)/detections)",
        [this](const httplib::Request& req) { return detections_json(req.matches[1], req); });
    get("/v1/conflicts", [this](const httplib::Request& req) { return conflicts_json(req); });
    server.Post(R"(/v1/conflicts/([^/]+)/decision)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 201, post_decision(req.matches[1], req.body)); });
    });
  }
};

Service::Service(Workbench bench, ServiceOptions options)
    : impl_(std::make_unique<Impl>(std::move(bench), std::move(options))) {}

Service::~Service() { stop(); }

bool Service::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int Service::bind_to_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool Service::listen_after_bind() { return impl_->server.listen_after_bind(); }

void Service::stop() {
  if (impl_) impl_->server.stop();
}

bool Service::is_running() const { return impl_->server.is_running(); }

bool serve(const fs::path& manifest, const std::string& address, ServiceOptions options) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos) throw ContractViolation(fmt::format("address \"{}\" is not host:port", address));
  const std::string host = address.substr(0, colon);
  int port = 0;
  const auto port_text = address.substr(colon + 1);
  auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc{} || ptr != port_text.data() + port_text.size()) {
    throw ContractViolation(fmt::format("address \"{}\" has an invalid port", address));
  }
  Service service(Workbench(load_dataset(manifest)), std::move(options));
  return service.listen(host, port);
}

}  // namespace bitewatch::io
