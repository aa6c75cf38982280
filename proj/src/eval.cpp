// SPDX-License-Identifier: Apache-2.0

#include "runsafe/eval.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <future>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

#include "runsafe/dynamic_predictor.hpp"
#include "runsafe/presets.hpp"

namespace runsafe {

namespace {

// Joe & Kuo direction numbers (new-joe-kuo-6.21201) for dimensions 2..13:
// degree s, polynomial a, initial m_1..m_s.
struct DirectionEntry {
    unsigned s;
    unsigned a;
    std::array<std::uint32_t, 5> m;
};

constexpr std::array<DirectionEntry, kSobolMaxDimension - 1> kDirections{{
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
}};

constexpr unsigned kBits = 32;

std::array<std::uint32_t, kBits> direction_numbers(std::size_t dim) {
    std::array<std::uint32_t, kBits> v{};
    if (dim == 0) {
        for (unsigned i = 0; i < kBits; ++i) v[i] = 1u << (kBits - 1 - i);
        return v;
    }
    const DirectionEntry& e = kDirections[dim - 1];
    for (unsigned i = 0; i < e.s; ++i) v[i] = e.m[i] << (kBits - 1 - i);
    for (unsigned i = e.s; i < kBits; ++i) {
        v[i] = v[i - e.s] ^ (v[i - e.s] >> e.s);
        for (unsigned k = 1; k < e.s; ++k) {
            if ((e.a >> (e.s - 1 - k)) & 1u) v[i] ^= v[i - k];
        }
    }
    return v;
}

}  // namespace

std::vector<std::vector<double>> sobol_unit(std::size_t n, std::size_t d) {
    if (d == 0 || d > kSobolMaxDimension) {
        throw Error(ErrorCode::DimensionLimit, "Sobol dimension " + std::to_string(d) + " outside [1, " +
                                                   std::to_string(kSobolMaxDimension) + "]");
    }
    if (n >= (std::size_t{1} << kBits)) {
        throw Error(ErrorCode::DimensionLimit, "too many Sobol points requested");
    }
    std::vector<std::array<std::uint32_t, kBits>> v;
    v.reserve(d);
    for (std::size_t j = 0; j < d; ++j) v.push_back(direction_numbers(j));

    std::vector<std::uint32_t> x(d, 0);
    std::vector<std::vector<double>> out;
    out.reserve(n);
    // Gray-code order; point i (1-based) flips the bit of the lowest zero of i-1.
    for (std::size_t i = 1; i <= n; ++i) {
        const auto c = static_cast<unsigned>(std::countr_one(i - 1));
        std::vector<double> p(d);
        for (std::size_t j = 0; j < d; ++j) {
            x[j] ^= v[j][c];
            p[j] = std::ldexp(static_cast<double>(x[j]), -static_cast<int>(kBits));
        }
        out.push_back(std::move(p));
    }
    return out;
}

DoeSpec DoeSpec::defaults(Procedure procedure) {
    DoeSpec spec;
    spec.procedure = procedure;
    if (procedure == Procedure::Takeoff) {
        spec.dimensions = {
            {"aircraft.mass", 55000.0, 79000.0},
            {"runway.headwind", -5.0, 10.0},
            {"runway.slope", -0.01, 0.01},
            {"atmosphere.air_density", 1.0, 1.3},
            {"v1", 60.0, 78.0},
        };
        spec.thresholds.max_abs_mean_deviation = 0.005;
        spec.thresholds.max_deviation_std = 0.02;
        spec.thresholds.max_median_convergence = 15.0;
        spec.thresholds.max_median_rto_convergence = 8.5;
    } else {
        spec.dimensions = {
            {"aircraft.mass", 50000.0, 66000.0},
            {"runway.headwind", -2.5, 7.5},
            {"runway.slope", -0.01, 0.01},
            {"atmosphere.air_density", 1.0, 1.3},
            {"vref", 62.0, 75.0},
            {"autobrake_detent", 0.0, 4.0},
        };
        spec.thresholds.min_conservative_fraction = 0.9;
        spec.thresholds.min_mean_deviation = 0.0;
        spec.thresholds.max_mean_deviation = 0.2;
        spec.thresholds.max_median_braking_convergence = 4.0;
    }
    return spec;
}

std::vector<FieldError> validate(const DoeSpec& spec) {
    std::vector<FieldError> out;
    if (spec.dimensions.empty()) out.push_back({"dimensions", "at least one dimension is required"});
    if (spec.dimensions.size() > kSobolMaxDimension) {
        out.push_back({"dimensions", "at most " + std::to_string(kSobolMaxDimension) + " dimensions are supported"});
    }
    for (std::size_t i = 0; i < spec.dimensions.size(); ++i) {
        const auto& d = spec.dimensions[i];
        const std::string field = "dimensions[" + std::to_string(i) + "]";
        if (!std::isfinite(d.lower) || !std::isfinite(d.upper) || !(d.lower < d.upper)) {
            out.push_back({field, "bounds must be finite with lower < upper"});
        }
        try {
            Scenario probe = base_scenario(spec.procedure);
            apply_dimension(probe, d.path, d.lower);
        } catch (const ValidationError& e) {
            out.push_back({field + ".path", e.fields().front().message});
        }
    }
    if (spec.num_points < 1) out.push_back({"num_points", "must be >= 1"});
    if (!(spec.convergence_band > 0.0 && spec.convergence_band < 1.0)) {
        out.push_back({"convergence_band", "must lie within (0, 1)"});
    }
    return out;
}

namespace {

std::optional<double> opt_number(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

void put_opt(nlohmann::json& j, const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
}

}  // namespace

DoeSpec doe_spec_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("spec", "must be an object");
    const Procedure procedure = procedure_from_string(j.value("procedure", std::string("takeoff")));
    DoeSpec spec = DoeSpec::defaults(procedure);
    try {
        if (j.contains("dimensions")) {
            spec.dimensions.clear();
            for (const auto& d : j.at("dimensions")) {
                spec.dimensions.push_back({d.at("path").get<std::string>(), d.at("lower").get<double>(),
                                           d.at("upper").get<double>()});
            }
        }
        spec.num_points = j.value("num_points", spec.num_points);
        spec.seed = j.value("seed", spec.seed);
        spec.convergence_band = j.value("convergence_band", spec.convergence_band);
        spec.threads = j.value("threads", spec.threads);
        if (j.contains("noise")) {
            const auto& n = j.at("noise");
            if (n.is_boolean()) {
                spec.noise_std = n.get<bool>() ? NoiseStd::defaults() : NoiseStd{};
            } else {
                spec.noise_std.ground_speed = n.value("ground_speed", 0.0);
                spec.noise_std.vertical_speed = n.value("vertical_speed", 0.0);
                spec.noise_std.height_agl = n.value("height_agl", 0.0);
                spec.noise_std.position = n.value("position", 0.0);
                spec.noise_std.acceleration = n.value("acceleration", 0.0);
            }
        }
        if (j.contains("thresholds")) {
            const auto& t = j.at("thresholds");
            DoeThresholds th;
            th.max_abs_mean_deviation = opt_number(t, "max_abs_mean_deviation");
            th.max_deviation_std = opt_number(t, "max_deviation_std");
            th.min_conservative_fraction = opt_number(t, "min_conservative_fraction");
            th.min_mean_deviation = opt_number(t, "min_mean_deviation");
            th.max_mean_deviation = opt_number(t, "max_mean_deviation");
            th.max_median_convergence = opt_number(t, "max_median_convergence");
            th.max_median_rto_convergence = opt_number(t, "max_median_rto_convergence");
            th.max_median_braking_convergence = opt_number(t, "max_median_braking_convergence");
            spec.thresholds = th;
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("spec", e.what());
    }
    if (auto errors = validate(spec); !errors.empty()) throw ValidationError(std::move(errors));
    return spec;
}

nlohmann::json to_json(const DoeSpec& spec) {
    nlohmann::json dims = nlohmann::json::array();
    for (const auto& d : spec.dimensions) dims.push_back({{"path", d.path}, {"lower", d.lower}, {"upper", d.upper}});
    nlohmann::json th = nlohmann::json::object();
    put_opt(th, "max_abs_mean_deviation", spec.thresholds.max_abs_mean_deviation);
    put_opt(th, "max_deviation_std", spec.thresholds.max_deviation_std);
    put_opt(th, "min_conservative_fraction", spec.thresholds.min_conservative_fraction);
    put_opt(th, "min_mean_deviation", spec.thresholds.min_mean_deviation);
    put_opt(th, "max_mean_deviation", spec.thresholds.max_mean_deviation);
    put_opt(th, "max_median_convergence", spec.thresholds.max_median_convergence);
    put_opt(th, "max_median_rto_convergence", spec.thresholds.max_median_rto_convergence);
    put_opt(th, "max_median_braking_convergence", spec.thresholds.max_median_braking_convergence);
    return {
        {"procedure", std::string(to_string(spec.procedure))},
        {"dimensions", dims},
        {"num_points", spec.num_points},
        {"seed", spec.seed},
        {"noise",
         {{"ground_speed", spec.noise_std.ground_speed},
          {"vertical_speed", spec.noise_std.vertical_speed},
          {"height_agl", spec.noise_std.height_agl},
          {"position", spec.noise_std.position},
          {"acceleration", spec.noise_std.acceleration}}},
        {"convergence_band", spec.convergence_band},
        {"threads", spec.threads},
        {"thresholds", th},
    };
}

std::vector<std::vector<double>> sobol_points(const DoeSpec& spec) {
    if (auto errors = validate(spec); !errors.empty()) throw ValidationError(std::move(errors));
    auto points = sobol_unit(spec.num_points, spec.dimensions.size());
    for (auto& p : points) {
        for (std::size_t j = 0; j < p.size(); ++j) {
            const auto& d = spec.dimensions[j];
            p[j] = d.lower + p[j] * (d.upper - d.lower);
        }
    }
    return points;
}

Scenario base_scenario(Procedure procedure) {
    const AircraftPreset preset = b737_800();
    Scenario s;
    if (procedure == Procedure::Takeoff) {
        s.kind = ScenarioKind::RtoAtSpeed;
        s.takeoff.aircraft = preset.configured(FlapDetent::F5);
        s.rto_speed = s.takeoff.v1;
    } else {
        s.kind = ScenarioKind::Landing;
        s.landing.aircraft = preset.configured(FlapDetent::F30);
        s.landing.autobrake_decel = preset.autobrake(AutobrakeDetent::AB3);
    }
    return s;
}

void apply_dimension(Scenario& s, const std::string& path, double value) {
    const bool landing = s.kind == ScenarioKind::Landing;
    AircraftParams& aircraft = landing ? s.landing.aircraft : s.takeoff.aircraft;
    RunwayParams& runway = landing ? s.landing.runway : s.takeoff.runway;
    AtmosphereParams& atmosphere = landing ? s.landing.atmosphere : s.takeoff.atmosphere;
    if (path == "aircraft.mass") {
        aircraft.mass = value;
    } else if (path == "runway.headwind") {
        runway.headwind = value;
    } else if (path == "runway.slope") {
        runway.slope = value;
    } else if (path == "runway.elevation") {
        runway.elevation = value;
    } else if (path == "atmosphere.air_density") {
        atmosphere.air_density = value;
    } else if (path == "v1" && !landing) {
        s.takeoff.v1 = value;
        s.takeoff.vr = value + 3.0;
        s.takeoff.v2 = value + 8.0;
        s.rto_speed = value;
    } else if (path == "vref" && landing) {
        s.landing.vref = value;
        s.landing.vapp = value + 2.0;
    } else if (path == "autobrake_detent" && landing) {
        const int i = std::clamp(static_cast<int>(std::floor(value)), 0, 3);
        s.landing.autobrake_decel = b737_800().autobrake(static_cast<AutobrakeDetent>(i));
    } else {
        throw ValidationError("path", "unknown DOE parameter '" + path + "' for " +
                                          (landing ? std::string("landing") : std::string("takeoff")));
    }
}

double convergence_time(const std::vector<SeriesPoint>& series, double final_value, double band) {
    if (series.empty()) throw Error(ErrorCode::NeverConverged, "empty prediction series");
    const double tol = band * std::abs(final_value);
    std::optional<double> since;
    for (const auto& p : series) {
        if (std::abs(p.value - final_value) <= tol) {
            if (!since) since = p.t;
        } else {
            since.reset();
        }
    }
    if (!since) throw Error(ErrorCode::NeverConverged, "prediction ends outside the band");
    return *since;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

struct Welford {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    double std() const { return n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0; }
};

std::optional<double> try_convergence(const std::vector<SeriesPoint>& series, double band) {
    if (series.empty()) return std::nullopt;
    try {
        return convergence_time(series, series.back().value, band);
    } catch (const Error&) {
        return std::nullopt;
    }
}

DoeRow run_takeoff_point(const DoeSpec& spec, Scenario scenario, DoeRow row) {
    IntegratorConfig integrator;
    integrator.reaction_time_at_v1 = 0.0;
    row.static_total = compute_asdr(scenario.takeoff, integrator).total;
    const ScenarioRun run = run_scenario(scenario);
    if (!run.truth.accelerate_stop_distance) {
        throw Error(ErrorCode::ScenarioInfeasible, "simulated takeoff never stopped");
    }
    row.truth_total = *run.truth.accelerate_stop_distance;
    row.deviation = (row.static_total - row.truth_total) / row.truth_total;

    TakeoffPredictor predictor(scenario.takeoff, integrator);
    std::vector<SeriesPoint> roll;
    std::vector<SeriesPoint> braking;
    Welford accel_latency;
    Welford braking_latency;
    for (const auto& frame : run.frames) {
        const auto t0 = Clock::now();
        const StepResult r = predictor.step(frame);
        const double ms = elapsed_ms(t0, Clock::now());
        if (!r.snapshot || r.snapshot->confidence == Confidence::Seeding) continue;
        const auto& snap = *r.snapshot;
        if (snap.procedure_stage == ProcedureStage::TakeoffRoll) {
            accel_latency.add(ms);
            roll.push_back({snap.timestamp - predictor.start_time(),
                            snap.dynamic_required_distance - run.frames.front().distance_along_runway});
        } else {
            braking_latency.add(ms);
            braking.push_back({snap.timestamp - predictor.rto_time(),
                               snap.stop_position - run.frames.front().distance_along_runway});
        }
    }
    row.convergence = try_convergence(roll, spec.convergence_band);
    row.rto_convergence = try_convergence(braking, spec.convergence_band);
    if (!braking.empty()) row.final_prediction_error = (braking.back().value - row.truth_total) / row.truth_total;
    row.accel_latency_mean_ms = accel_latency.mean;
    row.accel_latency_std_ms = accel_latency.std();
    row.braking_latency_mean_ms = braking_latency.mean;
    row.braking_latency_std_ms = braking_latency.std();
    return row;
}

DoeRow run_landing_point(const DoeSpec& spec, Scenario scenario, DoeRow row) {
    row.static_total = compute_ldr(scenario.landing).total;
    const ScenarioRun run = run_scenario(scenario);
    if (!run.truth.landing_distance || !run.truth.threshold_position) {
        throw Error(ErrorCode::ScenarioInfeasible, "simulated landing never stopped");
    }
    row.truth_total = *run.truth.landing_distance;
    row.deviation = (row.static_total - row.truth_total) / row.truth_total;

    LandingPredictor predictor(scenario.landing);
    std::vector<SeriesPoint> braking;
    Welford other_latency;
    Welford braking_latency;
    for (const auto& frame : run.frames) {
        const auto t0 = Clock::now();
        const StepResult r = predictor.step(frame);
        const double ms = elapsed_ms(t0, Clock::now());
        if (!r.snapshot) continue;
        const auto& snap = *r.snapshot;
        if (snap.procedure_stage == ProcedureStage::LandingBraking) {
            braking_latency.add(ms);
            braking.push_back({snap.timestamp - predictor.braking_start_time(), snap.stop_position});
        } else {
            other_latency.add(ms);
        }
    }
    row.convergence = try_convergence(braking, spec.convergence_band);
    if (!braking.empty()) {
        row.final_prediction_error =
            (braking.back().value - *run.truth.stop_position) / row.truth_total;
    }
    row.accel_latency_mean_ms = other_latency.mean;
    row.accel_latency_std_ms = other_latency.std();
    row.braking_latency_mean_ms = braking_latency.mean;
    row.braking_latency_std_ms = braking_latency.std();
    return row;
}

DoeRow run_point(const DoeSpec& spec, std::size_t index, const std::vector<double>& point) {
    DoeRow row;
    row.index = index;
    row.point = point;
    Scenario scenario = base_scenario(spec.procedure);
    for (std::size_t j = 0; j < point.size(); ++j) apply_dimension(scenario, spec.dimensions[j].path, point[j]);
    scenario.noise_std = spec.noise_std;
    scenario.noise_seed = spec.seed + index;
    try {
        return spec.procedure == Procedure::Takeoff ? run_takeoff_point(spec, scenario, row)
                                                     : run_landing_point(spec, scenario, row);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::ScenarioInfeasible && e.code() != ErrorCode::NonConvergence &&
            e.code() != ErrorCode::ValidationError) {
            throw;
        }
        row.feasible = false;
        row.failure = e.what();
        return row;
    }
}

Percentiles percentiles(std::vector<double> v) {
    Percentiles p;
    p.count = v.size();
    if (v.empty()) return p;
    std::sort(v.begin(), v.end());
    // Linear interpolation between order statistics.
    auto at = [&](double q) {
        const double pos = q * static_cast<double>(v.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
    };
    p.p50 = at(0.5);
    p.p90 = at(0.9);
    p.max = v.back();
    return p;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

}  // namespace

RunReport run_doe(const DoeSpec& spec) {
    const auto points = sobol_points(spec);
    RunReport report;
    report.spec = spec;
    report.rows.resize(points.size());

    unsigned workers = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, points.size()));
    std::vector<std::future<void>> jobs;
    jobs.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < points.size(); i += workers) report.rows[i] = run_point(spec, i, points[i]);
        }));
    }
    for (auto& j : jobs) j.get();
    report.summary = summarize(report.rows);
    return report;
}

DoeSummary summarize(const std::vector<DoeRow>& rows) {
    DoeSummary s;
    std::vector<double> dev;
    std::vector<double> conv;
    std::vector<double> rto_conv;
    std::size_t conservative = 0;
    for (const auto& r : rows) {
        if (!r.feasible) {
            ++s.infeasible;
            continue;
        }
        dev.push_back(r.deviation);
        if (r.static_total >= r.truth_total) ++conservative;
        if (r.convergence) {
            conv.push_back(*r.convergence);
        } else {
            ++s.never_converged;
        }
        if (r.rto_convergence) rto_conv.push_back(*r.rto_convergence);
    }
    s.runs = dev.size();
    if (!dev.empty()) {
        s.deviation_mean = std::accumulate(dev.begin(), dev.end(), 0.0) / static_cast<double>(dev.size());
        double ss = 0.0;
        for (double d : dev) ss += (d - s.deviation_mean) * (d - s.deviation_mean);
        s.deviation_std = dev.size() > 1 ? std::sqrt(ss / static_cast<double>(dev.size() - 1)) : 0.0;
        s.deviation_min = *std::min_element(dev.begin(), dev.end());
        s.deviation_max = *std::max_element(dev.begin(), dev.end());
        s.conservative_fraction = static_cast<double>(conservative) / static_cast<double>(dev.size());
    }
    s.convergence = percentiles(conv);
    s.rto_convergence = percentiles(rto_conv);
    return s;
}

std::vector<std::string> check_thresholds(const DoeSummary& s, const DoeThresholds& t) {
    std::vector<std::string> out;
    auto pct = [](double v) { return fmt(v * 100.0) + "%"; };
    if (s.runs == 0) {
        out.push_back("no feasible runs");
        return out;
    }
    if (t.max_abs_mean_deviation && std::abs(s.deviation_mean) > *t.max_abs_mean_deviation) {
        out.push_back("|mean deviation| " + pct(std::abs(s.deviation_mean)) + " > " + pct(*t.max_abs_mean_deviation));
    }
    if (t.max_deviation_std && s.deviation_std > *t.max_deviation_std) {
        out.push_back("deviation std " + pct(s.deviation_std) + " > " + pct(*t.max_deviation_std));
    }
    if (t.min_conservative_fraction && s.conservative_fraction < *t.min_conservative_fraction) {
        out.push_back("conservative fraction " + pct(s.conservative_fraction) + " < " +
                      pct(*t.min_conservative_fraction));
    }
    if (t.min_mean_deviation && s.deviation_mean < *t.min_mean_deviation) {
        out.push_back("mean deviation " + pct(s.deviation_mean) + " < " + pct(*t.min_mean_deviation));
    }
    if (t.max_mean_deviation && s.deviation_mean > *t.max_mean_deviation) {
        out.push_back("mean deviation " + pct(s.deviation_mean) + " > " + pct(*t.max_mean_deviation));
    }
    auto median_check = [&](const char* what, const Percentiles& p, const std::optional<double>& limit) {
        if (!limit) return;
        if (p.count == 0) {
            out.push_back(std::string(what) + ": no converged runs");
        } else if (p.p50 > *limit) {
            out.push_back(std::string(what) + " median " + fmt(p.p50) + " s > " + fmt(*limit) + " s");
        }
    };
    median_check("takeoff convergence", s.convergence, t.max_median_convergence);
    median_check("RTO convergence", s.rto_convergence, t.max_median_rto_convergence);
    median_check("braking convergence", s.convergence, t.max_median_braking_convergence);
    return out;
}

std::string rows_csv(const RunReport& report) {
    std::ostringstream os;
    os << "index";
    for (const auto& d : report.spec.dimensions) os << ',' << d.path;
    os << ",feasible,static_total,truth_total,deviation,convergence_s";
    if (report.spec.procedure == Procedure::Takeoff) os << ",rto_convergence_s";
    os << ",final_prediction_error,failure\n";
    for (const auto& r : report.rows) {
        os << r.index;
        for (double v : r.point) os << ',' << fmt(v);
        os << ',' << (r.feasible ? 1 : 0);
        if (r.feasible) {
            os << ',' << fmt(r.static_total) << ',' << fmt(r.truth_total) << ',' << fmt(r.deviation) << ','
               << fmt_opt(r.convergence);
            if (report.spec.procedure == Procedure::Takeoff) os << ',' << fmt_opt(r.rto_convergence);
            os << ',' << fmt(r.final_prediction_error) << ',';
        } else {
            os << ",,,,";
            if (report.spec.procedure == Procedure::Takeoff) os << ',';
            os << ",,\"" << r.failure << '"';
        }
        os << '\n';
    }
    return os.str();
}

std::string latency_csv(const RunReport& report) {
    std::ostringstream os;
    os << "index,accel_mean_ms,accel_std_ms,braking_mean_ms,braking_std_ms\n";
    for (const auto& r : report.rows) {
        if (!r.feasible) continue;
        os << r.index << ',' << fmt(r.accel_latency_mean_ms) << ',' << fmt(r.accel_latency_std_ms) << ','
           << fmt(r.braking_latency_mean_ms) << ',' << fmt(r.braking_latency_std_ms) << '\n';
    }
    return os.str();
}

std::string histogram_csv(const std::vector<DoeRow>& rows, double width) {
    std::ostringstream os;
    os << "lower,upper,count\n";
    std::vector<double> dev;
    for (const auto& r : rows) {
        if (r.feasible) dev.push_back(r.deviation);
    }
    if (dev.empty() || !(width > 0.0)) return os.str();
    const auto [lo_it, hi_it] = std::minmax_element(dev.begin(), dev.end());
    const auto first = static_cast<long long>(std::floor(*lo_it / width));
    const auto last = static_cast<long long>(std::floor(*hi_it / width));
    std::vector<std::size_t> counts(static_cast<std::size_t>(last - first + 1), 0);
    for (double d : dev) {
        const auto b = std::clamp(static_cast<long long>(std::floor(d / width)), first, last);
        ++counts[static_cast<std::size_t>(b - first)];
    }
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double lower = static_cast<double>(first + static_cast<long long>(i)) * width;
        os << fmt(lower) << ',' << fmt(lower + width) << ',' << counts[i] << '\n';
    }
    return os.str();
}

nlohmann::json summary_json(const RunReport& report) {
    const auto& s = report.summary;
    auto perc = [](const Percentiles& p) {
        return nlohmann::json{{"count", p.count}, {"p50", p.p50}, {"p90", p.p90}, {"max", p.max}};
    };
    Welford accel;
    Welford braking;
    for (const auto& r : report.rows) {
        if (!r.feasible) continue;
        accel.add(r.accel_latency_mean_ms);
        braking.add(r.braking_latency_mean_ms);
    }
    nlohmann::json j = {
        {"spec", to_json(report.spec)},
        {"runs", s.runs},
        {"infeasible", s.infeasible},
        {"deviation", {{"mean", s.deviation_mean}, {"std", s.deviation_std}, {"min", s.deviation_min}, {"max", s.deviation_max}}},
        {"conservative_fraction", s.conservative_fraction},
        {"never_converged", s.never_converged},
        {report.spec.procedure == Procedure::Takeoff ? "takeoff_convergence_s" : "braking_convergence_s",
         perc(s.convergence)},
        {"latency_ms", {{"update_mean", accel.mean}, {"braking_update_mean", braking.mean}}},
    };
    if (report.spec.procedure == Procedure::Takeoff) j["rto_convergence_s"] = perc(s.rto_convergence);
    const auto violations = check_thresholds(s, report.spec.thresholds);
    j["threshold_violations"] = violations;
    j["passed"] = violations.empty();
    return j;
}

namespace {

LatencyStats stats_of(std::vector<double> samples) {
    LatencyStats s;
    s.samples = samples.size();
    if (samples.empty()) return s;
    Welford w;
    for (double x : samples) w.add(x);
    s.mean_ms = w.mean;
    s.std_ms = w.std();
    auto mid = samples.begin() + static_cast<std::ptrdiff_t>(samples.size() / 2);
    std::nth_element(samples.begin(), mid, samples.end());
    s.median_ms = *mid;
    return s;
}

}  // namespace

LatencyReport latency_bench(std::size_t n_frames) {
    Scenario takeoff = base_scenario(Procedure::Takeoff);
    takeoff.noise_std = NoiseStd::defaults();
    Scenario landing = base_scenario(Procedure::Landing);
    landing.noise_std = NoiseStd::defaults();
    const auto takeoff_frames = run_scenario(takeoff).frames;
    const auto landing_frames = run_scenario(landing).frames;
    IntegratorConfig integrator;

    std::vector<double> accel;
    std::vector<double> braking;
    std::vector<double> noop;
    // The first pass warms caches and allocators and is discarded.
    for (int pass = 0; accel.size() < n_frames || braking.size() < n_frames || pass < 2; ++pass) {
        const bool keep = pass > 0;
        TakeoffPredictor tp(takeoff.takeoff, integrator);
        for (const auto& f : takeoff_frames) {
            const auto t0 = Clock::now();
            const StepResult r = tp.step(f);
            const auto t1 = Clock::now();
            if (!keep || !r.snapshot || r.snapshot->confidence == Confidence::Seeding) continue;
            (r.snapshot->procedure_stage == ProcedureStage::TakeoffRoll ? accel : braking).push_back(elapsed_ms(t0, t1));
        }
        LandingPredictor lp(landing.landing);
        for (const auto& f : landing_frames) {
            const auto t0 = Clock::now();
            const StepResult r = lp.step(f);
            const auto t1 = Clock::now();
            if (keep && r.snapshot && r.snapshot->procedure_stage == ProcedureStage::LandingBraking &&
                r.snapshot->confidence != Confidence::Seeding) {
                braking.push_back(elapsed_ms(t0, t1));
            }
        }
        if (keep) {
            for (std::size_t i = 0; i < 256; ++i) {
                const auto t0 = Clock::now();
                const auto t1 = Clock::now();
                noop.push_back(elapsed_ms(t0, t1));
            }
        }
    }
    return {stats_of(std::move(accel)), stats_of(std::move(braking)), stats_of(std::move(noop))};
}

nlohmann::json to_json(const LatencyReport& r) {
    auto one = [](const LatencyStats& s) {
        return nlohmann::json{{"samples", s.samples}, {"mean_ms", s.mean_ms}, {"std_ms", s.std_ms}, {"median_ms", s.median_ms}};
    };
    return {{"acceleration", one(r.acceleration)}, {"braking", one(r.braking)}, {"noop", one(r.noop)}};
}

}  // namespace runsafe
