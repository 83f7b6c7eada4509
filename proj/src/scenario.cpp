// Deterministic synthetic plant data. The generator only uses its own
// integer-based RNG so output is byte-identical across standard libraries.

#include "act/error.hpp"
#include "act/ingest.hpp"
#include "act/detail/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <map>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace act::ingest {

namespace {

using detail::fnv1a;
using detail::splitmix;

class Rng : public detail::Rng {
public:
    using detail::Rng::Rng;
    int below(int n) { return static_cast<int>(detail::Rng::below(static_cast<std::uint64_t>(n))); }
};

constexpr std::array<const char*, 3> kProcesses = {"mixing", "assembly", "packing"};
// The primary line runs a standardized process with fixed step durations.
constexpr std::array<double, 3> kPrimaryHours = {3.0, 4.0, 3.0};
constexpr std::array<std::array<double, 4>, 3> kOtherHours = {{
    {2.0, 2.5, 3.0, 3.5},
    {3.0, 3.5, 4.5, 5.0},
    {2.0, 2.5, 3.0, 3.0},
}};

std::string compact_date(std::int64_t day) {
    std::string d = format_date(day_start(day));
    d.erase(std::remove(d.begin(), d.end(), '-'), d.end());
    return d;
}

std::string iso(Timestamp t) { return format_timestamp(t); }

std::string hours(double h) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", h);
    return buf;
}

class CsvOut {
public:
    explicit CsvOut(const std::string& header) { os_ << header << '\n'; }
    void row(std::initializer_list<std::string> cells) {
        bool first = true;
        for (const auto& c : cells) {
            if (!first) os_ << ',';
            os_ << csv_escape(c);
            first = false;
        }
        os_ << '\n';
    }
    std::string str() const { return os_.str(); }

private:
    std::ostringstream os_;
};

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) out += '|';
        out += s;
    }
    return out;
}

}  // namespace

void ScenarioSpec::validate() const {
    if (n_lines < 1 || n_persons < 1 || n_materials < 1 || n_clients < 1 || horizon_days < 1 ||
        daily_order_rate < 1 || planning_days < 1)
        throw InvalidArgument("scenario counts must all be >= 1");
}

Timestamp scenario_now() { return *parse_timestamp("2019-10-01T13:00:00Z"); }

std::string synthetic_uuid(std::uint64_t seed, std::string_view tag) {
    const std::uint64_t a = splitmix(seed ^ fnv1a(tag));
    const std::uint64_t b = splitmix(a);
    char buf[33];
    std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(a),
                  static_cast<unsigned long long>(b));
    return buf;
}

std::vector<std::filesystem::path> generate_scenario(const ScenarioSpec& spec,
                                                     const std::filesystem::path& out_dir) {
    spec.validate();
    std::filesystem::create_directories(out_dir);
    const MappingTable& mt = MappingTable::builtin();
    const Timestamp now = scenario_now();
    const std::int64_t now_day = day_index(now);
    const std::int64_t day0 = now_day - std::max(0, spec.horizon_days - 4);
    const std::int64_t spike_from = day0 + std::max(0, spec.horizon_days - 7);
    const std::int64_t day_end = day0 + spec.horizon_days;
    std::vector<std::int64_t> spike_weeks;
    for (std::int64_t d = spike_from; d >= day0; d -= 56) spike_weeks.insert(spike_weeks.begin(), d);
    auto in_spike = [&](std::int64_t day) {
        for (std::int64_t d : spike_weeks)
            if (day >= d && day < d + 7) return true;
        return false;
    };
    const int scripted_day = spec.planning_days >= 2 ? 1 : 0;

    std::map<std::string, std::string> files;

    // --- organization structure
    {
        CsvOut o(mt.header("organization"));
        o.row({"org-1", "Synthetic Manufacturing Co."});
        files["organization"] = o.str();
        CsvOut p(mt.header("plant"));
        p.row({"plant-1", "Plant 1", "org-1"});
        files["plant"] = p.str();
        CsvOut f(mt.header("shop_floor"));
        f.row({"floor-1", "Shop floor 1", "plant-1"});
        files["shop_floor"] = f.str();
    }

    std::vector<std::string> lines;
    for (int i = 0; i < spec.n_lines; ++i) {
        if (i == 0)
            lines.push_back(ScenarioAnchors::primary_line);
        else if (i == 1)
            lines.push_back(ScenarioAnchors::secondary_line);
        else
            lines.push_back(synthetic_uuid(spec.seed, "line/" + std::to_string(i)));
    }
    {
        CsvOut out(mt.header("production_line"));
        for (int i = 0; i < spec.n_lines; ++i)
            out.row({lines[i], "Line " + std::to_string(i + 1), "plant-1"});
        files["production_line"] = out.str();
    }

    std::vector<std::vector<std::string>> crew(spec.n_lines);
    {
        CsvOut out(mt.header("person"));
        for (int k = 0; k < spec.n_persons; ++k) {
            const std::string id = "person-" + std::to_string(k + 1);
            const int line = k % spec.n_lines;
            crew[line].push_back(id);
            out.row({id, "Worker " + std::to_string(k + 1), lines[line]});
        }
        files["person"] = out.str();
    }

    // --- shifts over the planning window: 06-14 and 14-22 on every line
    {
        CsvOut out(mt.header("shift"));
        for (int d = 0; d < spec.planning_days; ++d) {
            for (int l = 0; l < spec.n_lines; ++l) {
                for (int s = 0; s < 2; ++s) {
                    const std::int64_t day = now_day + d;
                    const Timestamp start{day_start(day).millis + (6 + 8 * s) * kMillisPerHour};
                    const Timestamp end{start.millis + 8 * kMillisPerHour};
                    const bool scripted = l == 0 && d == scripted_day && s == 0;
                    const std::string id =
                        scripted ? std::string(ScenarioAnchors::downtime_shift)
                                 : synthetic_uuid(spec.seed, "shift/" + std::to_string(l) + "/" +
                                                                 std::to_string(d) + "/" +
                                                                 std::to_string(s));
                    const auto& people = crew[l];
                    const int staffed = std::min<int>(2, static_cast<int>(people.size()));
                    std::vector<std::string> assigned;
                    for (int k = 0; k < staffed; ++k)
                        assigned.push_back(people[(d * 2 + s + k) % people.size()]);
                    // The scripted shift is planned for one more person than assigned.
                    const int required = scripted ? staffed + 1 : staffed;
                    out.row({id, lines[l], iso(start), iso(end), std::to_string(required),
                             join(assigned)});
                }
            }
        }
        files["shift"] = out.str();
    }

    std::vector<std::string> materials, clients;
    for (int m = 0; m < spec.n_materials; ++m) materials.push_back("m" + std::to_string(m + 1));
    for (int c = 0; c < spec.n_clients; ++c) clients.push_back("c" + std::to_string(c + 1));
    {
        CsvOut loc(mt.header("stock_location"));
        loc.row({"loc-1", "Central warehouse"});
        files["stock_location"] = loc.str();
        CsvOut out(mt.header("material"));
        for (int m = 0; m < spec.n_materials; ++m)
            out.row({materials[m], "Material " + std::to_string(m + 1), m == 0 ? "40" : "5000",
                     "loc-1"});
        files["material"] = out.str();
        CsvOut cl(mt.header("client"));
        for (int c = 0; c < spec.n_clients; ++c) cl.row({clients[c], "Client " + std::to_string(c + 1)});
        files["client"] = cl.str();
    }

    // --- work orders: completed history with batch durations, plus the
    // scheduled orders of the planning window.
    {
        CsvOut out(mt.header("work_order"));
        Rng rng(spec.seed, "work_orders");
        auto pick_steps = [&](bool all) {
            if (all) return std::vector<int>{0, 1, 2};
            const int k = 1 + rng.below(3);
            std::vector<int> pool{0, 1, 2};
            while (static_cast<int>(pool.size()) > k) pool.erase(pool.begin() + rng.below(static_cast<int>(pool.size())));
            return pool;
        };
        std::vector<double> daily_qty(static_cast<std::size_t>(spec.n_lines) * (now_day - day0 + 1), 0.0);
        for (std::int64_t day = day0; day < now_day; ++day) {
            for (int l = 0; l < spec.n_lines; ++l) {
                const auto steps = pick_steps(day - day0 < 3);
                std::vector<std::string> procs, durs;
                for (int s : steps) {
                    procs.push_back(kProcesses[s]);
                    const double h = l == 0 ? kPrimaryHours[s] : kOtherHours[s][rng.below(4)];
                    durs.push_back(hours(h));
                }
                const Timestamp release{day_start(day).millis + 6 * kMillisPerHour};
                const int qty = 10 + rng.below(11);
                daily_qty[l * (now_day - day0 + 1) + (day - day0)] = qty;
                out.row({"wo-h-" + std::to_string(l + 1) + "-" + compact_date(day),
                         materials[rng.below(spec.n_materials)], lines[l], std::to_string(qty),
                         iso(release), iso(Timestamp{release.millis + kMillisPerDay}), "completed",
                         join(procs), join(durs)});
            }
        }
        for (int d = 0; d < spec.planning_days; ++d) {
            const std::int64_t day = now_day + d;
            for (int l = 0; l < spec.n_lines; ++l) {
                for (int s = 0; s < 2; ++s) {
                    const Timestamp release{day_start(day).millis + (6 + 8 * s) * kMillisPerHour};
                    if (l == 0 && d == scripted_day && s == 0) {
                        out.row({ScenarioAnchors::downtime_order, materials[0], lines[0], "15",
                                 iso(release),
                                 iso(Timestamp{release.millis + 8 * kMillisPerHour}), "scheduled",
                                 "mixing|assembly|packing", ""});
                        continue;
                    }
                    const auto steps = pick_steps(false);
                    const int qty = 10 + rng.below(11);
                    const std::string& mat = materials[rng.below(spec.n_materials)];
                    if (release < now) continue;
                    std::vector<std::string> procs;
                    for (int st : steps) procs.push_back(kProcesses[st]);
                    out.row({"wo-s-" + std::to_string(l + 1) + "-" + compact_date(day) + "-" +
                                 std::to_string(s + 1),
                             mat, lines[l], std::to_string(qty), iso(release),
                             iso(Timestamp{release.millis + kMillisPerDay}), "scheduled",
                             join(procs), ""});
                }
            }
        }
        files["work_order"] = out.str();

        CsvOut ts(mt.header("timeseries_point"));
        const std::int64_t from = std::max(day0, now_day - 14);
        for (int l = 0; l < spec.n_lines; ++l)
            for (std::int64_t day = from; day < now_day; ++day)
                ts.row({"ts-" + std::to_string(l + 1) + "-" + compact_date(day), "ds-mes",
                        iso(Timestamp{day_start(day).millis + 22 * kMillisPerHour}),
                        hours(daily_qty[l * (now_day - day0 + 1) + (day - day0)])});
        files["timeseries_point"] = ts.str();
    }

    {
        CsvOut out(mt.header("stock_order"));
        for (int m = 1; m < spec.n_materials; ++m)
            out.row({"sto-" + materials[m] + "-1", materials[m], "200",
                     iso(Timestamp{day_start(now_day + 3).millis + 12 * kMillisPerHour})});
        files["stock_order"] = out.str();
    }

    // --- shipping orders. Each (client, material) pair follows a persistent
    // demand level; orders per day are 1 + Poisson(rate - 1). The first
    // client's order quantities triple for a week every eight weeks, the
    // latest promotion covering the last seven days.
    {
        CsvOut out(mt.header("shipping_order"));
        Rng rng(spec.seed, "shipping_orders");
        std::vector<double> base, level;
        for (int c = 0; c < spec.n_clients; ++c)
            for (int m = 0; m < spec.n_materials; ++m) {
                base.push_back(20.0 + 5.0 * ((c + m) % 3));
                level.push_back(base.back());
            }
        std::size_t serial = 0;
        for (std::int64_t day = day0; day < day_end; ++day) {
            for (int c = 0; c < spec.n_clients; ++c) {
                for (int m = 0; m < spec.n_materials; ++m) {
                    const std::size_t k = static_cast<std::size_t>(c * spec.n_materials + m);
                    const int count = 1 + rng.poisson(spec.daily_order_rate - 1.0);
                    const double factor = (c == 0 && in_spike(day)) ? 3.0 : 1.0;
                    for (int i = 0; i < count; ++i) {
                        const double q = level[k] * (1.0 + 0.04 * (rng.uniform() - 0.5));
                        const long qty = std::max(1L, std::lround(q * factor));
                        char id[24];
                        std::snprintf(id, sizeof id, "so-%06zu", ++serial);
                        out.row({id, materials[m], clients[c], std::to_string(qty),
                                 iso(Timestamp{day_start(day).millis + 12 * kMillisPerHour})});
                    }
                    level[k] = base[k] + 0.97 * (level[k] - base[k]) + 0.02 * base[k] * rng.normal();
                    level[k] = std::max(level[k], 0.2 * base[k]);
                }
            }
        }
        files["shipping_order"] = out.str();
    }

    {
        CsvOut out(mt.header("decision_option_catalog"));
        out.row({"opt-pp-reschedule",
                 "Update the production schedule: move work order {work_order} out of shift {shift}",
                 "organizational_downtime", "uc-pp"});
        out.row({"opt-pp-extra-shift", "Add an additional shift on production line {line}",
                 "organizational_downtime", "uc-pp"});
        out.row({"opt-pp-retrain", "Retrain simulation model {model} on recent work orders",
                 "stale_model", "uc-pp"});
        out.row({"opt-df-raise-stock", "Raise a stock order for material {material}",
                 "stockout_risk", "uc-df"});
        out.row({"opt-df-add-wo", "Add a work order for material {material}", "stockout_risk",
                 "uc-df"});
        out.row({"opt-df-expedite",
                 "Increase production of material {material} to cover demand from client {client}",
                 "demand_spike", "uc-df"});
        out.row({"opt-df-confirm",
                 "Confirm the demand increase with client {client} before committing capacity",
                 "demand_spike", "uc-df"});
        out.row({"opt-df-retrain", "Retrain regression model {model} on recent shipping orders",
                 "stale_model", "uc-df"});
        files["decision_option_catalog"] = out.str();
    }

    std::vector<std::filesystem::path> written;
    for (const auto& km : mt.kinds) {
        auto it = files.find(km.kind);
        if (it == files.end()) continue;
        const auto path = out_dir / km.file;
        std::ofstream os(path, std::ios::binary);
        os << it->second;
        if (!os) throw Error("io", "cannot write " + path.string());
        written.push_back(path);
    }

    nlohmann::json manifest;
    manifest["seed"] = spec.seed;
    manifest["spec"] = {{"n_lines", spec.n_lines},
                        {"n_persons", spec.n_persons},
                        {"n_materials", spec.n_materials},
                        {"n_clients", spec.n_clients},
                        {"horizon_days", spec.horizon_days},
                        {"daily_order_rate", spec.daily_order_rate},
                        {"planning_days", spec.planning_days}};
    manifest["now"] = iso(now);
    manifest["lag_count"] = 7;
    manifest["forecast_horizon"] = 7;
    manifest["simulation_trials"] = 10000;
    manifest["history_start"] = format_date(day_start(day0));
    nlohmann::json runs = nlohmann::json::array();
    const std::int64_t baseline_day = days_from_civil(2019, 7, 1);
    if (baseline_day - day0 >= 7 + 7 + 10)
        runs.push_back({{"name", "baseline"}, {"as_of", iso(day_start(baseline_day))}, {"simulate", false}});
    runs.push_back({{"name", "main"}, {"as_of", iso(now)}, {"simulate", true}});
    manifest["runs"] = runs;
    manifest["anchors"] = {{"primary_line", ScenarioAnchors::primary_line},
                           {"secondary_line", ScenarioAnchors::secondary_line},
                           {"downtime_shift", ScenarioAnchors::downtime_shift},
                           {"downtime_order", ScenarioAnchors::downtime_order},
                           {"spike_client", clients[0]},
                           {"spike_from", format_date(day_start(spike_from))}};
    for (std::int64_t d : spike_weeks)
        manifest["anchors"]["spike_weeks"].push_back(format_date(day_start(d)));
    const auto mpath = out_dir / "scenario.json";
    std::ofstream ms(mpath, std::ios::binary);
    ms << manifest.dump(2) << '\n';
    written.push_back(mpath);
    return written;
}

}  // namespace act::ingest
