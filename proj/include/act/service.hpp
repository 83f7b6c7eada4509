#pragma once

// The runtime loop and its HTTP surface. `Api` is transport-independent: the
// HTTP server and the CLI both route requests through Api::handle, so the
// two produce identical payloads.

#include "act/decisions.hpp"
#include "act/error.hpp"
#include "act/graph.hpp"
#include "act/ontology.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

namespace act::service {

using Json = nlohmann::json;

ACT_DEFINE_ERROR(DeliveryFailed, "service.delivery_failed");

class PipelineError : public Error {
public:
    PipelineError(std::string step, const Error& cause)
        : Error(cause.code(), "step '" + step + "' failed: " + cause.what()), step_(std::move(step)) {}
    PipelineError(std::string step, const std::string& message)
        : Error("internal", "step '" + step + "' failed: " + message), step_(std::move(step)) {}
    const std::string& step() const noexcept { return step_; }

private:
    std::string step_;
};

// ---------------------------------------------------------------------------
// Pipeline

struct ModelRun {
    std::string name;
    Timestamp as_of{0};
    bool simulate = true;
};

struct PipelineConfig {
    std::filesystem::path data_dir;
    /// Unset: taken from <data_dir>/scenario.json, else the wall clock.
    std::optional<Timestamp> now;
    /// Unset: scenario.json runs, else one simulating run at `now`.
    std::optional<std::vector<ModelRun>> runs;
    std::optional<std::size_t> trials;  // default: scenario.json, else 10000
    std::uint64_t seed = 42;
    std::optional<int> lag_count;    // default: scenario.json, else 7
    std::optional<int> horizon_days; // default: scenario.json, else 7
    double l2 = 1.0;
    std::chrono::milliseconds max_model_age = std::chrono::hours(24 * 30);
    decide::HeuristicConfig heuristics;
    /// Called with (step, fraction done) while running.
    std::function<void(const std::string&, double)> progress;
};

/// Fills unset fields from scenario.json in data_dir.
PipelineConfig resolve(PipelineConfig config);

struct StepRecord {
    std::string name;
    double seconds = 0;
    std::map<std::string, std::int64_t> counts;
};

struct PipelineRun {
    std::string id;
    Timestamp now{0};
    std::vector<StepRecord> steps;  // ingest, reason, models, insights
    std::size_t forecasts = 0;      // produced or refreshed by this run
    std::size_t insights = 0;       // detected by this run
    std::size_t created = 0;        // nodes + edges created across steps

    Json to_json() const;
};

/// ingest -> reason -> models -> insights. Throws PipelineError naming the
/// failed step; earlier steps' writes remain in the graph.
PipelineRun run_pipeline(GraphStore& g, const onto::OntologyRegistry& reg, const PipelineConfig& config);

// ---------------------------------------------------------------------------
// Actuator

struct DeliveryReceipt {
    std::string url;
    std::string insight_id;
    std::string option_id;
    int status = 0;  // last HTTP status, 0 when unreachable
    int attempts = 0;
    bool delivered = false;
    std::string error;
    Timestamp sent_at{0};

    Json to_json() const;
};

/// POST of a JSON body; returns the HTTP status or 0 when unreachable.
using Transport = std::function<int(const std::string& url, const std::string& body)>;

Transport http_transport(std::chrono::milliseconds timeout = std::chrono::seconds(5));

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{100};  // doubled after each failure
};

/// Precondition unless the option was accepted for the insight. Delivery
/// failures are returned in the receipt, never thrown.
DeliveryReceipt actuate(const GraphStore& g, const onto::OntologyRegistry& reg, const std::string& url,
                        const std::string& insight_id, const std::string& option_id,
                        const Transport& transport, const RetryPolicy& policy, Timestamp now);

// ---------------------------------------------------------------------------
// API

struct Request {
    std::string method;  // GET, POST
    std::string path;    // without the /api/v1 prefix is also accepted
    std::map<std::string, std::string> query;
    std::string body;
    std::string authorization;  // raw header value
};

struct Response {
    int status = 200;
    Json body;
};

struct ApiConfig {
    std::filesystem::path data_dir;
    std::optional<std::filesystem::path> snapshot;  // saved after each mutation
    std::string token;                              // empty: no auth
    std::optional<Timestamp> now;                   // fixed clock for /pipeline etc.
    std::uint64_t seed = 42;
    Transport transport;                            // default http_transport()
    RetryPolicy retry;
};

/// Status and machine code for an engine error code.
int status_for(const std::string& code);
Response error_response(int status, const std::string& code, const std::string& message,
                        Json extra = Json::object());

class Api {
public:
    Api(GraphStore graph, ApiConfig config);
    ~Api();
    Api(const Api&) = delete;
    Api& operator=(const Api&) = delete;

    Response handle(const Request& request);

    /// Copy of the current graph.
    GraphStore snapshot() const;
    /// Blocks until background runs have finished.
    void wait_idle();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// HTTP binding of an Api under /api/v1.
class HttpServer {
public:
    explicit HttpServer(Api& api);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds and returns the port (`port` 0 picks a free one). Throws
    /// InvalidArgument when the address cannot be bound.
    int bind(const std::string& host, int port);
    /// Serves until stop().
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace act::service
