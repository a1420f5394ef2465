#pragma once

// HTTP facade. One analysis endpoint plus a health probe:
//   POST /operations/validity   body: {"document": "<inline SLA text>"} or
//                                     {"url": "<http URL>"} (needs fetching
//                                     enabled), optional "oas" and "capacity"
//                                     inline sidecars.
//   GET  /health
//
// The service never touches the local filesystem on behalf of a request:
// an inline document whose context.api points at a file gets a degraded
// (literal-paths) analysis with the broken reference reported in the body.
// Fetching by URL is off unless the process was started with it enabled.

#include "sla4oai/analysis.hpp"
#include "sla4oai/io.hpp"

#include <httplib.h>

#include <optional>
#include <ostream>
#include <string>

namespace sla4oai {

// Splits "http://host:port/path" into (origin, path). Returns nullopt for
// anything that is not a plain http URL (TLS is not compiled in).
inline std::optional<std::pair<std::string, std::string>> split_http_url(
    const std::string& url) {
  if (url.rfind("http://", 0) != 0) return std::nullopt;
  size_t host_start = 7;
  size_t path_start = url.find('/', host_start);
  if (path_start == std::string::npos)
    return std::make_pair(url, std::string("/"));
  return std::make_pair(url.substr(0, path_start), url.substr(path_start));
}

// Local files plus http fetching. Used when fetching has been opted into.
inline ResourceLoader fetching_loader(std::string base_dir = ".") {
  ResourceLoader files = offline_loader(std::move(base_dir));
  return [files](const std::string& uri) -> std::optional<std::string> {
    if (!is_url(uri)) return files(uri);
    auto parts = split_http_url(uri);
    if (!parts) return std::nullopt;  // https or malformed
    httplib::Client client(parts->first);
    client.set_follow_location(true);
    auto res = client.Get(parts->second);
    if (!res || res->status != 200) return std::nullopt;
    return res->body;
  };
}

// Loader for request-scoped analysis: nothing local, URLs only when allowed.
inline ResourceLoader service_loader(bool allow_fetch) {
  ResourceLoader fetcher = fetching_loader();
  return [allow_fetch, fetcher](const std::string& uri)
             -> std::optional<std::string> {
    if (!is_url(uri)) return std::nullopt;  // no filesystem access
    if (!allow_fetch) return std::nullopt;
    return fetcher(uri);
  };
}

struct ServiceConfig {
  bool allow_fetch = false;
};

inline void configure_server(httplib::Server& server, ServiceConfig config) {
  server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(Json{{"status", "ok"}}.dump() + "\n", "application/json");
  });

  server.Post("/operations/validity", [config](const httplib::Request& req,
                                               httplib::Response& res) {
    Json body;
    try {
      body = Json::parse(req.body);
    } catch (const Json::exception& e) {
      Json err;
      err["diagnostics"] = diagnostics_to_json(
          {{Severity::error, "INVALID_REQUEST", "/",
            std::string("request body is not JSON: ") + e.what()}});
      res.status = 400;
      res.set_content(err.dump(2) + "\n", "application/json");
      return;
    }

    std::string document;
    if (body.contains("document") && body["document"].is_string()) {
      document = body["document"].get<std::string>();
    } else if (body.contains("url") && body["url"].is_string()) {
      std::string url = body["url"].get<std::string>();
      if (!config.allow_fetch) {
        Json err;
        err["diagnostics"] = diagnostics_to_json(
            {{Severity::error, "FETCH_DENIED", "/url",
              "document fetching is disabled; POST the document inline"}});
        res.status = 422;
        res.set_content(err.dump(2) + "\n", "application/json");
        return;
      }
      auto fetched = fetching_loader()(url);
      if (!fetched) {
        Json err;
        err["diagnostics"] = diagnostics_to_json(
            {{Severity::error, "FETCH_FAILED", "/url",
              "cannot fetch document from '" + url + "'"}});
        res.status = 422;
        res.set_content(err.dump(2) + "\n", "application/json");
        return;
      }
      document = *fetched;
    } else {
      Json err;
      err["diagnostics"] = diagnostics_to_json(
          {{Severity::error, "INVALID_REQUEST", "/",
            "request needs a 'document' (inline text) or 'url' field"}});
      res.status = 400;
      res.set_content(err.dump(2) + "\n", "application/json");
      return;
    }

    MaterializeOptions options;
    options.loader = service_loader(config.allow_fetch);
    if (body.contains("oas") && body["oas"].is_string())
      options.oas_text = body["oas"].get<std::string>();
    std::optional<std::string> capacity;
    if (body.contains("capacity") && body["capacity"].is_string())
      capacity = body["capacity"].get<std::string>();

    AnalysisOutcome outcome = run_validity(document, options, capacity);
    res.status = outcome.syntax_ok ? 200 : 400;
    res.set_content(outcome_to_json(outcome).dump(2) + "\n", "application/json");
  });
}

// Blocks until the server stops. Returns 0 on a clean stop, 3 when the
// address cannot be bound.
inline int serve(const std::string& host_port, ServiceConfig config,
                 std::ostream& log) {
  size_t colon = host_port.rfind(':');
  if (colon == std::string::npos) {
    log << "error: --serve expects HOST:PORT, got '" << host_port << "'\n";
    return 3;
  }
  std::string host = host_port.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(host_port.substr(colon + 1));
  } catch (...) {
    log << "error: invalid port in '" << host_port << "'\n";
    return 3;
  }
  httplib::Server server;
  configure_server(server, config);
  log << "listening on " << host << ":" << port << "\n";
  if (!server.listen(host, port)) {
    log << "error: cannot bind " << host << ":" << port << "\n";
    return 3;
  }
  return 0;
}

}  // namespace sla4oai
