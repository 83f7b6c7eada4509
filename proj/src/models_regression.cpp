#include "act/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

namespace act::models {

namespace {

constexpr const char* kWeekdays[] = {"mon", "tue", "wed", "thu", "fri", "sat", "sun"};

std::string uuid_of(const Node& n) {
    const PropertyValue* v = n.property("uuid");
    return v ? v->as_text() : std::string();
}

std::string compact_date(std::int64_t day) {
    const std::string d = format_date(day_start(day));  // YYYY-MM-DD
    return d.substr(0, 4) + d.substr(5, 2) + d.substr(8, 2);
}

std::string join_numbers(const std::vector<double>& xs) {
    std::string out;
    char buf[32];
    for (std::size_t i = 0; i < xs.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", xs[i]);
        if (i) out += ',';
        out += buf;
    }
    return out;
}

/// In-place Cholesky of the symmetric matrix `a` (row-major, p×p); only the
/// lower triangle is read and overwritten.
bool cholesky(std::vector<double>& a, std::size_t p) {
    double max_diag = 0;
    for (std::size_t i = 0; i < p; ++i) max_diag = std::max(max_diag, std::abs(a[i * p + i]));
    const double tol = 1e-11 * std::max(1.0, max_diag);
    for (std::size_t j = 0; j < p; ++j) {
        double d = a[j * p + j];
        for (std::size_t k = 0; k < j; ++k) d -= a[j * p + k] * a[j * p + k];
        if (!(d > tol)) return false;
        const double l = std::sqrt(d);
        a[j * p + j] = l;
        for (std::size_t i = j + 1; i < p; ++i) {
            double s = a[i * p + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * p + k] * a[j * p + k];
            a[i * p + j] = s / l;
        }
    }
    return true;
}

std::vector<double> cholesky_solve(const std::vector<double>& l, std::size_t p,
                                   std::vector<double> b) {
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t k = 0; k < i; ++k) b[i] -= l[i * p + k] * b[k];
        b[i] /= l[i * p + i];
    }
    for (std::size_t i = p; i-- > 0;) {
        for (std::size_t k = i + 1; k < p; ++k) b[i] -= l[k * p + i] * b[k];
        b[i] /= l[i * p + i];
    }
    return b;
}

}  // namespace

DemandSeries demand_series(const GraphStore& g, const onto::OntologyRegistry& reg,
                           const std::string& material_uuid, const std::string& client_uuid,
                           std::optional<std::int64_t> until_day) {
    std::map<std::int64_t, double> daily;
    if (auto mat = ingest::find_entity(g, reg, "Material", material_uuid)) {
        for (const auto& so : g.neighbors(*mat, Direction::in, "OF_MATERIAL")) {
            if (!reg.is_a(so.node->label, "ShippingOrder")) continue;
            bool to_client = false;
            for (const auto& c : g.neighbors(so.node->id, Direction::out, "SHIPS_TO"))
                to_client |= uuid_of(*c.node) == client_uuid;
            if (!to_client) continue;
            const PropertyValue* due = so.node->property("due_ts");
            const PropertyValue* qty = so.node->property("qty");
            if (!due || !qty || due->kind() != ValueKind::timestamp) continue;
            const std::int64_t day = day_index(due->as_timestamp());
            if (until_day && day >= *until_day) continue;
            daily[day] += qty->as_real();
        }
    }
    DemandSeries s;
    if (daily.empty()) {
        if (until_day) s.first_day = *until_day;
        return s;
    }
    s.first_day = daily.begin()->first;
    const std::int64_t end = until_day ? *until_day : daily.rbegin()->first + 1;
    s.values.assign(static_cast<std::size_t>(std::max<std::int64_t>(0, end - s.first_day)), 0.0);
    for (const auto& [day, q] : daily) s.values[static_cast<std::size_t>(day - s.first_day)] = q;
    return s;
}

void DatasetSpecRecord::validate() const {
    if (lag_count < 1) throw InvalidArgument("lag_count must be at least 1");
    if (horizon_days < 1) throw InvalidArgument("horizon_days must be at least 1");
}

std::vector<std::string> DatasetSpecRecord::feature_names() const {
    std::vector<std::string> names;
    for (int k = 1; k <= lag_count; ++k) names.push_back("lag_" + std::to_string(k));
    if (calendar_features)
        for (const char* d : kWeekdays) names.push_back(std::string("dow_") + d);
    return names;
}

std::vector<double> feature_row(const DemandSeries& series, const DatasetSpecRecord& spec,
                                std::int64_t anchor_day) {
    spec.validate();
    if (anchor_day - spec.lag_count < series.first_day || anchor_day > series.end_day())
        throw FeatureUnavailable("lags for " + format_date(day_start(anchor_day)) +
                                 " fall outside the demand history");
    std::vector<double> row;
    for (int k = 1; k <= spec.lag_count; ++k) row.push_back(series.at(anchor_day - k));
    if (spec.calendar_features) {
        const int dow = day_of_week(anchor_day + spec.horizon_days - 1);
        for (int d = 0; d < 7; ++d) row.push_back(d == dow ? 1.0 : 0.0);
    }
    return row;
}

Dataset build_dataset(const DemandSeries& series, const DatasetSpecRecord& spec) {
    spec.validate();
    const std::size_t need = static_cast<std::size_t>(spec.lag_count + spec.horizon_days);
    if (series.values.size() < need) throw DatasetTooSmall(need, series.values.size());
    Dataset d;
    d.feature_names = spec.feature_names();
    for (std::int64_t t = series.first_day + spec.lag_count;
         t + spec.horizon_days - 1 < series.end_day(); ++t) {
        d.x.push_back(feature_row(series, spec, t));
        d.y.push_back(series.at(t + spec.horizon_days - 1));
        d.anchor_days.push_back(t);
    }
    return d;
}

Dataset build_dataset(const GraphStore& g, const onto::OntologyRegistry& reg,
                      const DatasetSpecRecord& spec, std::optional<std::int64_t> until_day) {
    return build_dataset(demand_series(g, reg, spec.material_uuid, spec.client_uuid, until_day), spec);
}

double RegressionParams::predict(const std::vector<double>& features) const {
    if (features.size() != weights.size())
        throw InvalidArgument("expected " + std::to_string(weights.size()) + " features, got " +
                              std::to_string(features.size()));
    double y = intercept;
    for (std::size_t i = 0; i < weights.size(); ++i) y += weights[i] * features[i];
    return y;
}

RegressionParams fit_regression(const Dataset& data, double l2) {
    if (!(l2 >= 0) || !std::isfinite(l2)) throw InvalidArgument("l2 must be a finite non-negative number");
    const std::size_t n = data.x.size();
    if (n < 1 || n != data.y.size()) throw InvalidArgument("regression needs at least one row");
    const std::size_t p = data.x.front().size();
    if (p < 1) throw InvalidArgument("regression needs at least one feature");

    std::vector<double> xm(p, 0.0);
    double ym = 0;
    for (std::size_t r = 0; r < n; ++r) {
        if (data.x[r].size() != p) throw InvalidArgument("ragged feature rows");
        for (std::size_t j = 0; j < p; ++j) xm[j] += data.x[r][j];
        ym += data.y[r];
    }
    for (double& v : xm) v /= static_cast<double>(n);
    ym /= static_cast<double>(n);

    // Normal equations of the centered problem.
    std::vector<double> a(p * p, 0.0), b(p, 0.0);
    std::vector<double> xc(p);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < p; ++j) xc[j] = data.x[r][j] - xm[j];
        const double yc = data.y[r] - ym;
        for (std::size_t i = 0; i < p; ++i) {
            b[i] += xc[i] * yc;
            for (std::size_t j = 0; j <= i; ++j) a[i * p + j] += xc[i] * xc[j];
        }
    }
    for (std::size_t i = 0; i < p; ++i) {
        a[i * p + i] += l2;
        for (std::size_t j = 0; j < i; ++j) a[j * p + i] = a[i * p + j];
    }
    std::vector<double> l = a;
    if (!cholesky(l, p))
        throw SingularDesign(l2 == 0 ? "design matrix is rank deficient; use l2 > 0"
                                     : "normal equations are not positive definite");
    std::vector<double> w = cholesky_solve(l, p, b);
    for (int iter = 0; iter < 2; ++iter) {
        std::vector<double> r = b;
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j) r[i] -= a[i * p + j] * w[j];
        const std::vector<double> dw = cholesky_solve(l, p, r);
        for (std::size_t i = 0; i < p; ++i) w[i] += dw[i];
    }

    RegressionParams params;
    params.weights = std::move(w);
    params.l2 = l2;
    params.intercept = ym;
    for (std::size_t j = 0; j < p; ++j) params.intercept -= params.weights[j] * xm[j];
    params.feature_names = data.feature_names;
    if (params.feature_names.size() != p) {
        params.feature_names.clear();
        for (std::size_t j = 0; j < p; ++j) params.feature_names.push_back("x" + std::to_string(j + 1));
    }
    for (double v : params.weights)
        if (!std::isfinite(v)) throw SingularDesign("non-finite weights");
    return params;
}

double ridge_objective(const Dataset& data, const RegressionParams& params) {
    double sse = 0;
    for (std::size_t r = 0; r < data.x.size(); ++r) {
        const double e = data.y[r] - params.predict(data.x[r]);
        sse += e * e;
    }
    double norm = 0;
    for (double w : params.weights) norm += w * w;
    return sse + params.l2 * norm;
}

DemandForecast forecast_demand(const RegressionParams& params, const DemandSeries& series,
                               const DatasetSpecRecord& spec, Timestamp as_of) {
    const std::int64_t day = day_index(as_of);
    DemandForecast f;
    f.material_uuid = spec.material_uuid;
    f.client_uuid = spec.client_uuid;
    f.horizon_days = spec.horizon_days;
    f.as_of = as_of;
    f.target_date = day_start(day + spec.horizon_days - 1);
    f.features = feature_row(series, spec, day);
    const double raw = params.predict(f.features);
    f.clamped = raw < 0;
    f.value = f.clamped ? 0.0 : raw;
    return f;
}

DemandForecast forecast_demand(const RegressionParams& params, const GraphStore& g,
                               const onto::OntologyRegistry& reg, const DatasetSpecRecord& spec,
                               Timestamp as_of) {
    const std::int64_t day = day_index(as_of);
    return forecast_demand(params, demand_series(g, reg, spec.material_uuid, spec.client_uuid, day),
                           spec, as_of);
}

std::vector<std::pair<std::string, std::string>> demand_pairs(const GraphStore& g,
                                                              const onto::OntologyRegistry& reg) {
    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto& label : reg.descendants("ShippingOrder"))
        for (NodeId so : g.nodes_with_label(label))
            for (const auto& m : g.neighbors(so, Direction::out, "OF_MATERIAL"))
                for (const auto& c : g.neighbors(so, Direction::out, "SHIPS_TO"))
                    pairs.emplace(uuid_of(*m.node), uuid_of(*c.node));
    return {pairs.begin(), pairs.end()};
}

DemandRun run_demand_forecast(GraphStore& g, const onto::OntologyRegistry& reg,
                              const DemandJob& job) {
    if (job.max_horizon < 1) throw InvalidArgument("max_horizon must be at least 1");
    const std::int64_t day = day_index(job.as_of);
    const DemandSeries series = demand_series(g, reg, job.material_uuid, job.client_uuid, day);
    const std::string pair = job.material_uuid + "-" + job.client_uuid;
    const std::string date = compact_date(day);

    DemandRun run;
    std::vector<ingest::NodeRecord> nodes;
    std::vector<ingest::LinkRecord> links;
    std::vector<ingest::ForecastRecord> records;
    for (int h = 1; h <= job.max_horizon; ++h) {
        DatasetSpecRecord spec{job.material_uuid, job.client_uuid, job.lag_count, h};
        const Dataset data = build_dataset(series, spec);
        RegressionParams params = fit_regression(data, job.l2);
        DemandForecast f = forecast_demand(params, series, spec, job.as_of);

        const std::string hs = "h" + std::to_string(h);
        const std::string dss = "dss-" + pair + "-L" + std::to_string(job.lag_count) + "-" + hs;
        const std::string ds = "ds-" + pair + "-" + hs + "-" + date;
        const std::string rm = "rm-" + pair + "-" + hs + "-" + date;
        f.model_uuid = rm;
        f.forecast_uuid = "fc-" + pair + "-" + hs + "-" + date;

        std::string names;
        for (const auto& n : params.feature_names) names += (names.empty() ? "" : ",") + n;
        nodes.push_back({"DatasetSpecification", dss,
                         {{"lag_count", static_cast<std::int64_t>(job.lag_count)},
                          {"horizon_days", static_cast<std::int64_t>(h)},
                          {"material", job.material_uuid},
                          {"client", job.client_uuid},
                          {"features", names}}});
        nodes.push_back({"Dataset", ds,
                         {{"rows", static_cast<std::int64_t>(data.x.size())},
                          {"first_day", day_start(series.first_day)},
                          {"last_day", day_start(series.end_day() - 1)}}});
        nodes.push_back({"RegressionModel", rm,
                         {{"trained_at", job.as_of},
                          {"target_date", f.target_date},
                          {"horizon_days", static_cast<std::int64_t>(h)},
                          {"l2", job.l2},
                          {"intercept", params.intercept},
                          {"weights", join_numbers(params.weights)}}});
        links.push_back({"SOURCED_FROM", dss, "DatasetSpecification", "ip-shipping-orders",
                         "InformationProvenance"});
        links.push_back({"SPECIFIED_BY", ds, "Dataset", dss, "DatasetSpecification"});
        links.push_back({"TRAINED_ON", rm, "RegressionModel", ds, "Dataset"});
        links.push_back({"USES_ALGORITHM", rm, "RegressionModel", "alg-ridge", "RegressionAlgorithm"});
        links.push_back({"CORRESPONDS_TO", rm, "RegressionModel", "uc-df", "UseCase"});

        ingest::ForecastRecord r;
        r.uuid = f.forecast_uuid;
        r.model_uuid = rm;
        r.properties = {{"kind", "demand"},
                        {"issued_at", job.as_of},
                        {"target_date", f.target_date},
                        {"value", f.value},
                        {"clamped", f.clamped},
                        {"horizon_days", static_cast<std::int64_t>(h)}};
        r.target_uuids = {job.material_uuid, job.client_uuid};
        std::string features;
        for (std::size_t i = 0; i < f.features.size(); ++i) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%s=%.17g", params.feature_names[i].c_str(), f.features[i]);
            features += (i ? ";" : "") + std::string(buf);
        }
        r.feature_vector = ingest::NodeRecord{
            "FeatureVector", "fv-" + pair + "-" + hs + "-" + date,
            {{"features", features}, {"as_of", job.as_of}}};
        records.push_back(std::move(r));

        run.forecasts.push_back(std::move(f));
        run.params.push_back(std::move(params));
    }
    run.report = ingest::load_inductive(g, reg, "models:regression", nodes, links, job.as_of);
    run.report += ingest::load_forecasts(records, g, reg, job.as_of);
    return run;
}

}  // namespace act::models
