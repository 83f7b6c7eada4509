#pragma once

// Inductive models: Monte Carlo completion-time simulation for scheduled work
// orders and lag-feature ridge regression for daily demand. Results are
// written back through ingest::load_inductive / load_forecasts.

#include "act/error.hpp"
#include "act/graph.hpp"
#include "act/ingest.hpp"
#include "act/ontology.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace act::models {

ACT_DEFINE_ERROR(SimulationDataError, "models.simulation_data");
ACT_DEFINE_ERROR(SingularDesign, "models.singular_design");
ACT_DEFINE_ERROR(FeatureUnavailable, "models.feature_unavailable");

class DatasetTooSmall : public Error {
public:
    DatasetTooSmall(std::size_t required, std::size_t available)
        : Error("models.dataset_too_small",
                "dataset needs " + std::to_string(required) + " days of history, " +
                    std::to_string(available) + " available"),
          required_(required), available_(available) {}
    std::size_t required() const noexcept { return required_; }
    std::size_t available() const noexcept { return available_; }

private:
    std::size_t required_;
    std::size_t available_;
};

// ---------------------------------------------------------------------------
// Simulation

struct SimulationConfig {
    std::size_t n_trials = 10000;
    std::uint64_t rng_seed = 0;
    std::vector<double> quantiles{0.1, 0.5, 0.9};
    /// Lines are idle from this instant on; steps never start earlier.
    std::optional<Timestamp> start;
    /// Stamped on the model and its forecasts when persisted.
    Timestamp issued_at{0};

    void validate() const;
};

struct SimulationForecast {
    NodeId work_order{};
    std::string work_order_uuid;
    NodeId line{};
    /// (probability, completion) ascending in probability.
    std::vector<std::pair<double, Timestamp>> quantiles;
    std::size_t trials = 0;
    bool low_confidence = false;
    std::string model_uuid;

    Timestamp at(double p) const;  // throws NotFound for an unconfigured p
};

/// Orders whose status is not "completed" and that are SCHEDULED_ON a line.
/// Step durations are resampled from historical ManufacturedBatch durations
/// of the same (line, process_type); a line with no such history uses the
/// plant-wide pool and flags the forecast low_confidence. Orders on a line
/// are dispatched one step at a time, earliest due date first.
std::vector<SimulationForecast> simulate_work_orders(const GraphStore& g,
                                                     const onto::OntologyRegistry& reg,
                                                     const SimulationConfig& config);

/// "model-sim-<yyyymmddThhmm>" for the given issue time.
std::string simulation_model_uuid(Timestamp issued_at);

/// SimulationModel (CORRESPONDS_TO uc-pp) plus one Forecast per order with
/// p<q> timestamp properties and FORECAST_FOR the work order. Fills
/// `model_uuid` in place.
ingest::IngestReport persist_simulation(GraphStore& g, const onto::OntologyRegistry& reg,
                                        std::vector<SimulationForecast>& forecasts,
                                        const SimulationConfig& config);

/// Property name used for quantile p ("p10", "p50", "p97.5").
std::string quantile_property(double p);

// ---------------------------------------------------------------------------
// Demand regression

struct DemandSeries {
    std::int64_t first_day = 0;  // day index of values[0]
    std::vector<double> values;  // one per day, zero-filled

    std::int64_t end_day() const { return first_day + static_cast<std::int64_t>(values.size()); }
    double at(std::int64_t day) const { return values.at(static_cast<std::size_t>(day - first_day)); }
};

/// Daily sum of ShippingOrder qty by due date for (material, client). The
/// series starts at the first day with an order and ends just before
/// `until_day` when given, else after the last order.
DemandSeries demand_series(const GraphStore& g, const onto::OntologyRegistry& reg,
                           const std::string& material_uuid, const std::string& client_uuid,
                           std::optional<std::int64_t> until_day = std::nullopt);

struct DatasetSpecRecord {
    std::string material_uuid;
    std::string client_uuid;
    int lag_count = 7;
    int horizon_days = 1;
    bool calendar_features = true;
    std::string provenance_uuid = "ip-shipping-orders";

    void validate() const;
    /// lag_1..lag_L then dow_mon..dow_sun.
    std::vector<std::string> feature_names() const;
};

struct Dataset {
    std::vector<std::string> feature_names;
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    /// Day index t of each row; the target is day t + horizon - 1.
    std::vector<std::int64_t> anchor_days;
};

/// Rows for every t with t-L and t+h-1 inside the series:
/// features s[t-1..t-L] (+ weekday one-hot of day t+h-1), target s[t+h-1].
Dataset build_dataset(const DemandSeries& series, const DatasetSpecRecord& spec);
Dataset build_dataset(const GraphStore& g, const onto::OntologyRegistry& reg,
                      const DatasetSpecRecord& spec, std::optional<std::int64_t> until_day);

/// Feature vector for anchor day t; FeatureUnavailable when a lag day falls
/// outside the series.
std::vector<double> feature_row(const DemandSeries& series, const DatasetSpecRecord& spec,
                                std::int64_t anchor_day);

struct RegressionParams {
    std::vector<double> weights;
    double intercept = 0;
    double l2 = 0;
    std::vector<std::string> feature_names;

    double predict(const std::vector<double>& features) const;
};

/// Minimizes ||y - Xw - b||^2 + l2 ||w||^2 with b unpenalized.
RegressionParams fit_regression(const Dataset& data, double l2);

/// Penalized objective of `params` on `data`.
double ridge_objective(const Dataset& data, const RegressionParams& params);

struct DemandForecast {
    std::string material_uuid;
    std::string client_uuid;
    int horizon_days = 1;
    Timestamp as_of{0};
    Timestamp target_date{0};
    double value = 0;
    bool clamped = false;
    std::vector<double> features;
    std::string model_uuid;
    std::string forecast_uuid;
};

/// Applies `params` to the live feature vector for the day of `as_of`.
DemandForecast forecast_demand(const RegressionParams& params, const GraphStore& g,
                               const onto::OntologyRegistry& reg, const DatasetSpecRecord& spec,
                               Timestamp as_of);
DemandForecast forecast_demand(const RegressionParams& params, const DemandSeries& series,
                               const DatasetSpecRecord& spec, Timestamp as_of);

struct DemandJob {
    std::string material_uuid;
    std::string client_uuid;
    int lag_count = 7;
    int max_horizon = 7;
    double l2 = 1.0;
    Timestamp as_of{0};
};

struct DemandRun {
    std::vector<DemandForecast> forecasts;  // one per horizon 1..max_horizon
    std::vector<RegressionParams> params;
    ingest::IngestReport report;
};

/// One model per horizon, trained on history strictly before the as_of day,
/// persisted with its dataset specification, dataset, feature vector and
/// forecast.
DemandRun run_demand_forecast(GraphStore& g, const onto::OntologyRegistry& reg,
                              const DemandJob& job);

/// (material, client) pairs that have shipping orders, sorted by uuid.
std::vector<std::pair<std::string, std::string>> demand_pairs(const GraphStore& g,
                                                              const onto::OntologyRegistry& reg);

}  // namespace act::models
