#pragma once

#include "d2dcache/analytics.hpp"
#include "d2dcache/channel.hpp"
#include "d2dcache/content.hpp"
#include "d2dcache/error.hpp"
#include "d2dcache/mobility.hpp"
#include "d2dcache/placement.hpp"
#include "d2dcache/random.hpp"
#include "d2dcache/simulator.hpp"
#include "d2dcache/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace d2dcache::experiments {

// Default scenario of the mobility study. Every preset starts from these.
namespace defaults {
inline constexpr double density = 2.5e-3;          // transmitters / m^2
inline constexpr double power = 0.5;               // W
inline constexpr double noise = 1e-11;             // W / Hz
inline constexpr double bandwidth = 5e6;           // Hz
inline constexpr double pathloss_exponent = 4.0;
inline constexpr std::size_t catalogue_size = 100;
inline constexpr std::size_t ordered_catalogue_size = 200;
inline constexpr double zipf_exponent = 0.78;
inline constexpr std::size_t capacity = 5;          // objects per cache
inline constexpr double audio_mean_bits = 1e7;      // 10 Mb
inline constexpr double video_mean_bits = 1e9;      // 1 Gb
inline constexpr double video_min_bits = 5e7;       // 50 Mb
inline constexpr double video_max_bits = 2e9;       // 2 Gb
inline constexpr double audio_min_bits = 1e5;       // 100 Kb
inline constexpr double audio_max_bits = 2e7;       // 20 Mb
inline constexpr double fixed_lifespan = 1000.0;    // s, distribution comparison
inline constexpr std::size_t iterations = 2000;
inline constexpr std::uint64_t seed = 1;
inline constexpr double half_width = 50e3;          // 100 x 100 km window
inline constexpr std::size_t mc_samples = 20000;
inline constexpr std::size_t grid_points = 10;
} // namespace defaults

/// The five video size laws of the distribution comparison, all with mean 1 Gb.
inline std::vector<content::SizeLaw> video_size_laws()
{
    const double ln10 = std::numbers::ln10;
    return {
        content::UniformSize{defaults::video_min_bits, defaults::video_max_bits},
        content::ExponentialSize{1.0 / defaults::video_mean_bits},
        content::ParetoSize{20.0 / 19.0, 0.05e9},
        content::LogNormalSize{5.0 * ln10, std::sqrt(8.0 * ln10), std::nullopt, std::nullopt},
        content::WeibullSize{276.0, 0.1},
    };
}

enum class PresetKind {
    validate_audio,
    validate_video,
    correlation_video,
    expected_comparison,
    ordered_comparison,
    custom,
};

inline constexpr std::array<std::pair<PresetKind, std::string_view>, 6> kPresetNames{{
    {PresetKind::validate_audio, "validate_audio"},
    {PresetKind::validate_video, "validate_video"},
    {PresetKind::correlation_video, "correlation_video"},
    {PresetKind::expected_comparison, "expected_comparison"},
    {PresetKind::ordered_comparison, "ordered_comparison"},
    {PresetKind::custom, "custom"},
}};

inline std::string to_string(PresetKind kind)
{
    for (const auto& [k, n] : kPresetNames)
        if (k == kind)
            return std::string(n);
    return "?";
}

inline std::optional<PresetKind> parse_preset_kind(std::string_view name)
{
    for (const auto& [k, n] : kPresetNames)
        if (n == name)
            return k;
    return std::nullopt;
}

enum class SweepVariable { mean_lifespan, density };

inline std::string to_string(SweepVariable v)
{
    return v == SweepVariable::mean_lifespan ? "mean_lifespan" : "density";
}

struct Sweep {
    SweepVariable variable = SweepVariable::mean_lifespan;
    std::vector<double> values;
};

enum class LifespanFamily { fixed, exponential };

/// Scenario template; the sweep variable overrides one field per point.
struct Scenario {
    double density = defaults::density;
    channel::RadioParams radio{defaults::power, defaults::noise, defaults::bandwidth,
                               defaults::pathloss_exponent, channel::NoiseReference::in_band};
    channel::FadingLaw fading = channel::ExponentialFading{1.0};
    LifespanFamily lifespan = LifespanFamily::exponential;
    double mean_lifespan = 100.0;
    std::size_t catalogue_size = defaults::catalogue_size;
    double zipf_exponent = defaults::zipf_exponent;
    std::size_t capacity = defaults::capacity;
    content::SizeLaw size_law = content::ExponentialSize{1.0 / defaults::audio_mean_bits};
    content::SizeOrdering ordering = content::SizeOrdering::independent;
};

struct ExperimentPreset {
    PresetKind kind = PresetKind::custom;
    Scenario scenario;
    std::vector<Sweep> sweeps;
    std::size_t iterations = defaults::iterations;
    std::uint64_t seed = defaults::seed;
    unsigned threads = 1;
    double half_width = defaults::half_width;
    std::size_t mc_samples = defaults::mc_samples;
};

struct ResultRow {
    std::string sweep_name;
    double sweep_value = 0.0;
    std::string variant;
    double analytic = 0.0;
    double simulated = 0.0;
    double stderr_ = 0.0;           // of the simulated value
    double analytic_stderr = 0.0;   // nonzero only for Monte Carlo size averages
    std::size_t n_iter = 0;
    std::uint64_t seed = 0;
    double wall_time = 0.0;         // seconds; not emitted
};

namespace detail {

inline std::vector<double> even_grid(double hi, std::size_t points)
{
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i)
        g[i] = hi * static_cast<double>(i + 1) / static_cast<double>(points);
    return g;
}

inline void fail(const std::string& field, const std::string& what)
{
    throw ConfigError(field + ": " + what);
}

} // namespace detail

/// Preset with every parameter at its default.
inline ExperimentPreset make_preset(PresetKind kind)
{
    ExperimentPreset p;
    p.kind = kind;
    Scenario& s = p.scenario;
    const auto audio_grid = detail::even_grid(100.0, defaults::grid_points);
    const auto video_grid = detail::even_grid(1000.0, defaults::grid_points);
    switch (kind) {
    case PresetKind::validate_audio:
    case PresetKind::custom:
        s.size_law = content::ExponentialSize{1.0 / defaults::audio_mean_bits};
        p.sweeps = {{SweepVariable::mean_lifespan, audio_grid}};
        break;
    case PresetKind::validate_video:
    case PresetKind::correlation_video:
        s.size_law = content::ExponentialSize{1.0 / defaults::video_mean_bits};
        p.sweeps = {{SweepVariable::mean_lifespan, video_grid}};
        break;
    case PresetKind::expected_comparison:
        s.lifespan = LifespanFamily::fixed;
        s.mean_lifespan = defaults::fixed_lifespan;
        s.size_law = content::ExponentialSize{1.0 / defaults::video_mean_bits};
        p.sweeps = {{SweepVariable::mean_lifespan, video_grid},
                    {SweepVariable::density, detail::even_grid(defaults::density, defaults::grid_points)}};
        break;
    case PresetKind::ordered_comparison:
        s.lifespan = LifespanFamily::fixed;
        s.catalogue_size = defaults::ordered_catalogue_size;
        s.ordering = content::SizeOrdering::decreasing;
        s.size_law = content::ExponentialSize{1.0 / defaults::video_mean_bits};
        p.sweeps = {{SweepVariable::mean_lifespan, video_grid}};
        break;
    }
    return p;
}

inline ExperimentPreset make_preset(std::string_view name)
{
    const auto kind = parse_preset_kind(name);
    if (!kind)
        throw ConfigError("preset: unknown preset '" + std::string(name) + "'");
    return make_preset(*kind);
}

/// Checks every field, naming the offending config key.
inline void validate(const ExperimentPreset& p)
{
    auto check = [](bool ok, const std::string& field, const std::string& what) {
        if (!ok)
            detail::fail(field, what);
    };
    const Scenario& s = p.scenario;
    check(std::isfinite(s.density) && s.density > 0.0, "network.density", "must be > 0");
    check(s.radio.power > 0.0, "network.power", "must be > 0");
    check(s.radio.noise > 0.0, "network.noise", "must be > 0");
    check(s.radio.bandwidth > 0.0, "network.bandwidth", "must be > 0");
    check(s.radio.pathloss_exponent > 2.0, "network.pathloss_exponent", "must be > 2");
    try {
        channel::validate(s.fading);
    } catch (const ConfigError& e) {
        detail::fail("fading", e.what());
    }
    check(std::isfinite(s.mean_lifespan) && s.mean_lifespan > 0.0, "mobility.mean_lifespan",
          "must be > 0");
    check(s.catalogue_size >= 2, "content.catalogue_size", "must be >= 2");
    check(std::isfinite(s.zipf_exponent) && s.zipf_exponent >= 0.0, "content.zipf_exponent",
          "must be >= 0");
    check(s.capacity >= 1, "content.capacity", "must be >= 1");
    check(2 * s.capacity <= s.catalogue_size, "content.capacity", "needs 2 * capacity <= catalogue_size");
    try {
        content::validate(s.size_law);
    } catch (const ConfigError& e) {
        detail::fail("content.size_law", e.what());
    }
    check(p.iterations >= 1, "run.iterations", "must be >= 1");
    check(p.threads >= 1, "run.threads", "must be >= 1");
    check(std::isfinite(p.half_width) && p.half_width > 0.0, "run.half_width", "must be > 0");
    check(p.mc_samples >= 1000, "run.mc_samples", "must be >= 1000");
    check(!p.sweeps.empty(), "sweep", "at least one sweep is required");
    for (const auto& sw : p.sweeps) {
        check(!sw.values.empty(), "sweep.values", "grid must be nonempty");
        for (std::size_t i = 0; i < sw.values.size(); ++i) {
            check(std::isfinite(sw.values[i]) && sw.values[i] > 0.0, "sweep.values",
                  "grid values must be > 0");
            if (i > 0)
                check(sw.values[i] > sw.values[i - 1], "sweep.values",
                      "grid must be strictly increasing");
        }
    }
}

// ---------------------------------------------------------------------------
// Configuration files
//
//   # comment
//   preset = validate_video
//   [run]
//   seed = 7
//   [sweep]
//   variable = mean_lifespan
//   values = 100, 200, 400
//
// Keys are section-qualified ("run.seed"); unknown or repeated keys are errors.

namespace detail {

struct Entry {
    std::string value;
    std::size_t line = 0;
};

inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::map<std::string, Entry> parse_key_values(std::istream& in, const std::string& origin)
{
    std::map<std::string, Entry> entries;
    std::string section;
    std::string raw;
    std::size_t line_no = 0;
    auto error = [&](const std::string& what) {
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                error("unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                error("empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            error("expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            error("missing key before '='");
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        const std::string full = section.empty() ? key : section + "." + key;
        if (entries.count(full))
            error("duplicate key '" + full + "'");
        entries[full] = {value, line_no};
    }
    return entries;
}

inline double parse_double(const std::string& key, const Entry& e)
{
    double v = 0.0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last)
        throw ConfigError("line " + std::to_string(e.line) + ": " + key + ": expected a number, got '" +
                          e.value + "'");
    return v;
}

inline std::uint64_t parse_unsigned(const std::string& key, const Entry& e)
{
    std::uint64_t v = 0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last)
        throw ConfigError("line " + std::to_string(e.line) + ": " + key +
                          ": expected a nonnegative integer, got '" + e.value + "'");
    return v;
}

inline std::vector<double> parse_list(const std::string& key, const Entry& e)
{
    std::vector<double> out;
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_double(key, {trim(item), e.line}));
    return out;
}

} // namespace detail

inline const std::set<std::string>& known_config_keys()
{
    static const std::set<std::string> keys = {
        "preset",
        "run.seed", "run.iterations", "run.threads", "run.half_width", "run.mc_samples",
        "network.density", "network.power", "network.noise", "network.bandwidth",
        "network.pathloss_exponent", "network.noise_reference",
        "fading.law", "fading.rate", "fading.mu", "fading.sigma", "fading.scale", "fading.shape",
        "fading.m", "fading.omega", "fading.nu",
        "content.catalogue_size", "content.zipf_exponent", "content.capacity", "content.size_law",
        "content.ordering", "content.mean", "content.min", "content.max", "content.shape",
        "content.scale", "content.mu", "content.sigma",
        "mobility.lifespan", "mobility.mean_lifespan",
        "sweep.variable", "sweep.values",
    };
    return keys;
}

/// Builds a preset from config text. `origin` prefixes parse errors.
inline ExperimentPreset parse_config(std::istream& in, const std::string& origin = "<config>")
{
    using detail::Entry;
    auto entries = detail::parse_key_values(in, origin);
    for (const auto& [key, e] : entries)
        if (!known_config_keys().count(key))
            throw ConfigError(origin + ":" + std::to_string(e.line) + ": unknown key '" + key + "'");
    if (!entries.count("preset"))
        throw ConfigError(origin + ": missing required field 'preset'");

    ExperimentPreset p = make_preset(entries.at("preset").value);
    Scenario& s = p.scenario;
    auto has = [&](const char* k) { return entries.count(k) > 0; };
    auto num = [&](const char* k) { return detail::parse_double(k, entries.at(k)); };
    auto uint = [&](const char* k) { return detail::parse_unsigned(k, entries.at(k)); };
    auto text = [&](const char* k) { return entries.at(k).value; };
    auto num_or = [&](const char* k, double fallback) { return has(k) ? num(k) : fallback; };

    if (has("run.seed")) p.seed = uint("run.seed");
    if (has("run.iterations")) p.iterations = uint("run.iterations");
    if (has("run.threads")) p.threads = static_cast<unsigned>(uint("run.threads"));
    if (has("run.half_width")) p.half_width = num("run.half_width");
    if (has("run.mc_samples")) p.mc_samples = uint("run.mc_samples");

    if (has("network.density")) s.density = num("network.density");
    if (has("network.power")) s.radio.power = num("network.power");
    if (has("network.noise")) s.radio.noise = num("network.noise");
    if (has("network.bandwidth")) s.radio.bandwidth = num("network.bandwidth");
    if (has("network.pathloss_exponent")) s.radio.pathloss_exponent = num("network.pathloss_exponent");
    if (has("network.noise_reference")) {
        const auto v = text("network.noise_reference");
        if (v == "in_band") s.radio.noise_reference = channel::NoiseReference::in_band;
        else if (v == "per_hertz") s.radio.noise_reference = channel::NoiseReference::per_hertz;
        else detail::fail("network.noise_reference", "expected in_band or per_hertz, got '" + v + "'");
    }

    if (has("fading.law")) {
        const auto law = text("fading.law");
        if (law == "exponential") s.fading = channel::ExponentialFading{num_or("fading.rate", 1.0)};
        else if (law == "lognormal") s.fading = channel::LogNormalFading{num_or("fading.mu", 0.0), num_or("fading.sigma", 1.0)};
        else if (law == "weibull") s.fading = channel::WeibullFading{num_or("fading.scale", 1.0), num_or("fading.shape", 1.0)};
        else if (law == "nakagami") s.fading = channel::NakagamiFading{num_or("fading.m", 1.0), num_or("fading.omega", 1.0)};
        else if (law == "rice") s.fading = channel::RiceFading{num_or("fading.nu", 1.0), num_or("fading.sigma", 1.0)};
        else detail::fail("fading.law", "unknown fading law '" + law + "'");
    }

    if (has("content.catalogue_size")) s.catalogue_size = uint("content.catalogue_size");
    if (has("content.zipf_exponent")) s.zipf_exponent = num("content.zipf_exponent");
    if (has("content.capacity")) s.capacity = uint("content.capacity");
    if (has("content.size_law")) {
        const auto law = text("content.size_law");
        if (law == "uniform")
            s.size_law = content::UniformSize{num_or("content.min", defaults::video_min_bits),
                                              num_or("content.max", defaults::video_max_bits)};
        else if (law == "exponential")
            s.size_law = content::ExponentialSize{1.0 / num_or("content.mean", defaults::video_mean_bits)};
        else if (law == "pareto")
            s.size_law = content::ParetoSize{num_or("content.shape", 20.0 / 19.0), num_or("content.scale", 0.05e9)};
        else if (law == "weibull")
            s.size_law = content::WeibullSize{num_or("content.scale", 276.0), num_or("content.shape", 0.1)};
        else if (law == "lognormal") {
            content::LogNormalSize ln{num_or("content.mu", 5.0 * std::numbers::ln10),
                                      num_or("content.sigma", std::sqrt(8.0 * std::numbers::ln10)),
                                      std::nullopt, std::nullopt};
            if (has("content.min")) ln.lower = num("content.min");
            if (has("content.max")) ln.upper = num("content.max");
            s.size_law = ln;
        } else
            detail::fail("content.size_law", "unknown size law '" + law + "'");
    }
    if (has("content.ordering")) {
        const auto v = text("content.ordering");
        if (v == "independent") s.ordering = content::SizeOrdering::independent;
        else if (v == "increasing") s.ordering = content::SizeOrdering::increasing;
        else if (v == "decreasing") s.ordering = content::SizeOrdering::decreasing;
        else detail::fail("content.ordering", "expected independent, increasing or decreasing");
    }

    if (has("mobility.lifespan")) {
        const auto v = text("mobility.lifespan");
        if (v == "fixed") s.lifespan = LifespanFamily::fixed;
        else if (v == "exponential") s.lifespan = LifespanFamily::exponential;
        else detail::fail("mobility.lifespan", "expected fixed or exponential");
    }
    if (has("mobility.mean_lifespan")) s.mean_lifespan = num("mobility.mean_lifespan");

    if (has("sweep.variable") || has("sweep.values")) {
        Sweep sw;
        sw.variable = p.sweeps.front().variable;
        if (has("sweep.variable")) {
            const auto v = text("sweep.variable");
            if (v == "mean_lifespan") sw.variable = SweepVariable::mean_lifespan;
            else if (v == "density") sw.variable = SweepVariable::density;
            else detail::fail("sweep.variable", "expected mean_lifespan or density");
        }
        if (has("sweep.values")) {
            sw.values = detail::parse_list("sweep.values", entries.at("sweep.values"));
        } else {
            auto it = std::find_if(p.sweeps.begin(), p.sweeps.end(),
                                   [&](const Sweep& x) { return x.variable == sw.variable; });
            if (it == p.sweeps.end())
                detail::fail("sweep.values", "required when the preset has no default grid for '" +
                                                 to_string(sw.variable) + "'");
            sw.values = it->values;
        }
        p.sweeps = {sw};
    }

    validate(p);
    return p;
}

inline ExperimentPreset load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path + ": cannot open config file");
    return parse_config(in, path);
}

/// A preset name or a config file path.
inline ExperimentPreset resolve_preset(const std::string& name_or_path)
{
    if (parse_preset_kind(name_or_path))
        return make_preset(name_or_path);
    return load_config(name_or_path);
}

// ---------------------------------------------------------------------------
// Running presets

/// One curve of a preset: a catalogue (or, for the expected metric, a size law).
struct Variant {
    std::string label;
    content::ContentCatalogue catalogue;
    std::optional<content::SizeLaw> expected_over; // set for the expected metric
};

inline std::vector<Variant> build_variants(const ExperimentPreset& p, std::ostream* log = nullptr)
{
    const Scenario& s = p.scenario;
    const auto popularity = content::zipf_popularity(s.catalogue_size, s.zipf_exponent);
    auto sample_set = [&](const content::SizeLaw& law, std::uint64_t index) {
        auto rng = RandomStream::derive(p.seed, {index, static_cast<std::uint64_t>(StreamRole::content)});
        return content::make_catalogue(popularity, content::sample_sizes(law, s.catalogue_size, rng));
    };
    std::vector<Variant> variants;
    switch (p.kind) {
    case PresetKind::validate_audio:
    case PresetKind::validate_video:
    case PresetKind::custom: {
        auto cat = content::apply_ordering(sample_set(s.size_law, 0), s.ordering);
        std::string label = content::name(s.size_law);
        if (s.ordering != content::SizeOrdering::independent)
            label += "_" + content::to_string(s.ordering);
        variants.push_back({label, std::move(cat), std::nullopt});
        break;
    }
    case PresetKind::correlation_video: {
        const auto common = sample_set(s.size_law, 0);
        for (auto mode : {content::SizeOrdering::increasing, content::SizeOrdering::independent,
                          content::SizeOrdering::decreasing})
            variants.push_back({content::to_string(mode), content::apply_ordering(common, mode), std::nullopt});
        break;
    }
    case PresetKind::expected_comparison: {
        // Sizes are integrated out; the catalogue only carries popularity.
        for (const auto& law : video_size_laws()) {
            content::ContentCatalogue cat{popularity, {}, content::SizeOrdering::independent};
            variants.push_back({content::name(law), std::move(cat), law});
        }
        break;
    }
    case PresetKind::ordered_comparison: {
        const auto laws = video_size_laws();
        for (std::size_t i = 0; i < laws.size(); ++i) {
            auto cat = content::apply_ordering(sample_set(laws[i], i), content::SizeOrdering::decreasing);
            if (log) {
                *log << "ordered_comparison top sizes [Gb] " << content::name(laws[i]) << ":";
                for (double z : content::top_sizes(cat.sizes, 5)) {
                    char buf[32];
                    std::snprintf(buf, sizeof buf, " %.2f", z / 1e9);
                    *log << buf;
                }
                *log << '\n';
            }
            variants.push_back({content::name(laws[i]), std::move(cat), std::nullopt});
        }
        break;
    }
    }
    return variants;
}

/// Model inputs of one sweep point.
inline analytics::AnalyticInputs point_inputs(const ExperimentPreset& p, const Variant& v,
                                              SweepVariable variable, double value)
{
    const Scenario& s = p.scenario;
    analytics::AnalyticInputs in;
    in.density = variable == SweepVariable::density ? value : s.density;
    in.radio = s.radio;
    in.fading = s.fading;
    const double mean = variable == SweepVariable::mean_lifespan ? value : s.mean_lifespan;
    if (s.lifespan == LifespanFamily::fixed)
        in.lifespan = mobility::FixedLifespan{mean};
    else
        in.lifespan = mobility::ExponentialLifespan{mean};
    in.catalogue = v.catalogue;
    in.placement = placement::heuristic_marginals(v.catalogue.popularity, s.capacity);
    return in;
}

/**
 * Runs every (sweep, point, variant) of the preset, in that order. Each
 * point's simulation has its own random streams keyed by its position, so
 * the rows depend only on the preset and its seed.
 */
inline std::vector<ResultRow> run_preset(const ExperimentPreset& p, std::ostream* log = nullptr)
{
    validate(p);
    const auto variants = build_variants(p, log);
    std::vector<ResultRow> rows;
    for (std::size_t si = 0; si < p.sweeps.size(); ++si) {
        const Sweep& sweep = p.sweeps[si];
        for (std::size_t pi = 0; pi < sweep.values.size(); ++pi) {
            for (std::size_t vi = 0; vi < variants.size(); ++vi) {
                const Variant& v = variants[vi];
                const double x = sweep.values[pi];
                const auto t0 = std::chrono::steady_clock::now();
                ResultRow row;
                row.sweep_name = to_string(sweep.variable);
                row.sweep_value = x;
                row.variant = v.label;
                row.n_iter = p.iterations;
                row.seed = p.seed;
                try {
                    const auto inputs = point_inputs(p, v, sweep.variable, x);
                    const std::uint64_t key = (static_cast<std::uint64_t>(si) << 40) |
                                              (static_cast<std::uint64_t>(pi) << 20) | vi;
                    simulator::SimulationConfig cfg;
                    cfg.model = inputs;
                    cfg.window = geometry::Window(p.half_width);
                    cfg.iterations = p.iterations;
                    cfg.seed = p.seed;
                    cfg.stream_key = key;
                    cfg.threads = p.threads;
                    if (v.expected_over) {
                        auto rng = RandomStream::derive(p.seed, {key, static_cast<std::uint64_t>(StreamRole::size), 1});
                        const auto e = analytics::expected_success(inputs, *v.expected_over, p.mc_samples, rng);
                        row.analytic = e.value;
                        row.analytic_stderr = e.standard_error;
                        cfg.resample_size = *v.expected_over;
                    } else {
                        row.analytic = analytics::total_success(inputs).value;
                        if (log && analytics::window_too_small(inputs, p.half_width))
                            *log << "warning: window half width " << p.half_width
                                 << " m is within a factor 10 of the coverage radius scale "
                                 << analytics::coverage_radius_scale(inputs) << " m\n";
                    }
                    const auto sim = simulator::estimate_total_success(cfg);
                    row.simulated = sim.value;
                    row.stderr_ = sim.standard_error;
                } catch (const std::exception& e) {
                    throw NumericError(to_string(p.kind) + " " + row.sweep_name + "=" +
                                       format_number(x) + " " + v.label + ": " + e.what());
                }
                row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                if (log) {
                    const double se0 = std::hypot(simulator::binomial_standard_error(row.analytic, row.n_iter),
                                                  row.analytic_stderr);
                    if (std::abs(row.simulated - row.analytic) > 4.0 * se0)
                        *log << "flag: " << row.sweep_name << "=" << format_number(x) << " " << row.variant
                             << " simulated " << row.simulated << " is more than 4 standard errors from "
                             << row.analytic << '\n';
                }
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Output

enum class OutputFormat { csv, json };

inline constexpr std::array<std::string_view, 8> kResultColumns = {
    "sweep_name", "sweep_value", "variant", "analytic", "simulated", "stderr", "n_iter", "seed"};

inline void emit_results(const std::vector<ResultRow>& rows, OutputFormat format, std::ostream& out)
{
    if (format == OutputFormat::csv) {
        for (std::size_t i = 0; i < kResultColumns.size(); ++i)
            out << (i ? "," : "") << kResultColumns[i];
        out << '\n';
        for (const auto& r : rows)
            out << r.sweep_name << ',' << format_number(r.sweep_value) << ',' << r.variant << ','
                << format_number(r.analytic) << ',' << format_number(r.simulated) << ','
                << format_number(r.stderr_) << ',' << r.n_iter << ',' << r.seed << '\n';
        return;
    }
    auto array = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json o;
        o["sweep_name"] = r.sweep_name;
        o["sweep_value"] = r.sweep_value;
        o["variant"] = r.variant;
        o["analytic"] = r.analytic;
        o["simulated"] = r.simulated;
        o["stderr"] = r.stderr_;
        o["n_iter"] = r.n_iter;
        o["seed"] = r.seed;
        array.push_back(std::move(o));
    }
    out << array.dump(2) << '\n';
}

inline void emit_results(const std::vector<ResultRow>& rows, OutputFormat format, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error(path + ": cannot open for writing");
    emit_results(rows, format, out);
    out.flush();
    if (!out)
        throw std::runtime_error(path + ": write failed");
}

/// Reads rows written by emit_results in CSV form.
inline std::vector<ResultRow> read_results_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line))
        throw ConfigError("results csv: missing header");
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            f.push_back(cell);
        if (f.size() != kResultColumns.size())
            throw ConfigError("results csv: expected 8 fields, got " + std::to_string(f.size()));
        auto d = [&](std::size_t i) { return detail::parse_double(std::string(kResultColumns[i]), {f[i], 0}); };
        auto u = [&](std::size_t i) { return detail::parse_unsigned(std::string(kResultColumns[i]), {f[i], 0}); };
        ResultRow r;
        r.sweep_name = f[0];
        r.sweep_value = d(1);
        r.variant = f[2];
        r.analytic = d(3);
        r.simulated = d(4);
        r.stderr_ = d(5);
        r.n_iter = u(6);
        r.seed = u(7);
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace d2dcache::experiments
