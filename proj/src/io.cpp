// JSON configs, CSV maps with meta header, sidecars, PGM heatmaps, fit reports

#include "wavemix/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "wavemix/units.hpp"

namespace wavemix {

using nlohmann::json;

ConfigError::ConfigError(const std::string& file, int line, const std::string& field,
                         const std::string& message)
    : std::runtime_error([&] {
          std::ostringstream s;
          s << file;
          if (line > 0) s << ":" << line;
          if (!field.empty()) s << ": field '" << field << "'";
          s << ": " << message;
          return s.str();
      }()),
      file_(file), line_(line), field_(field)
{
}

namespace {

int line_at_byte(const std::string& text, std::size_t byte)
{
    byte = std::min(byte, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

// Parses JSON and resolves field paths to source lines for diagnostics.
class Source {
public:
    Source(std::string text, std::string file) : text_(std::move(text)), file_(std::move(file)) {}

    json parse() const
    {
        try {
            return json::parse(text_);
        } catch (const json::parse_error& e) {
            throw ConfigError(file_, line_at_byte(text_, e.byte == 0 ? 0 : e.byte - 1), "",
                              "malformed JSON: " + std::string(e.what()));
        }
    }

    [[noreturn]] void fail(const std::string& field, const std::string& message) const
    {
        // last path component, as it appears quoted in the source
        const std::string key = field.substr(field.find_last_of('.') + 1);
        const std::string bare = key.substr(0, key.find('['));
        const auto pos = text_.find("\"" + bare + "\"");
        throw ConfigError(file_, pos == std::string::npos ? 0 : line_at_byte(text_, pos), field, message);
    }

    const std::string& file() const { return file_; }

private:
    std::string text_;
    std::string file_;
};

void check_keys(const Source& src, const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed)
{
    if (!obj.is_object()) src.fail(path.empty() ? "<root>" : path, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (!ok.count(key)) src.fail(path.empty() ? key : path + "." + key, "unknown field");
    }
}

std::string join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

double get_number(const Source& src, const json& obj, const std::string& path, const char* key,
                  std::optional<double> fallback = std::nullopt)
{
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        src.fail(join(path, key), "missing required number");
    }
    const json& v = obj.at(key);
    if (!v.is_number()) src.fail(join(path, key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) src.fail(join(path, key), "must be finite");
    return d;
}

double get_nonnegative(const Source& src, const json& obj, const std::string& path, const char* key,
                       std::optional<double> fallback = std::nullopt)
{
    const double d = get_number(src, obj, path, key, fallback);
    if (d < 0.0) src.fail(join(path, key), "must be >= 0");
    return d;
}

long get_integer(const Source& src, const json& obj, const std::string& path, const char* key,
                 long fallback, long minimum)
{
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) src.fail(join(path, key), "expected an integer");
    const long n = v.get<long>();
    if (n < minimum) src.fail(join(path, key), "must be >= " + std::to_string(minimum));
    return n;
}

std::string get_string(const Source& src, const json& obj, const std::string& path, const char* key,
                       std::optional<std::string> fallback = std::nullopt)
{
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        src.fail(join(path, key), "missing required string");
    }
    const json& v = obj.at(key);
    if (!v.is_string()) src.fail(join(path, key), "expected a string");
    return v.get<std::string>();
}

Scheme parse_scheme(const Source& src, const json& obj, const std::string& path)
{
    const std::string s = get_string(src, obj, path, "scheme");
    try {
        return scheme_from_string(s);
    } catch (const std::exception&) {
        src.fail(join(path, "scheme"), "expected \"A\", \"B\" or \"C\", got \"" + s + "\"");
    }
}

HamiltonianMode parse_mode(const Source& src, const json& obj)
{
    const std::string s = get_string(src, obj, "", "hamiltonian", "corrected");
    try {
        return hamiltonian_mode_from_string(s);
    } catch (const std::exception&) {
        src.fail("hamiltonian", "expected \"corrected\" or \"verbatim\", got \"" + s + "\"");
    }
}

RateSet parse_rates(const Source& src, const json& obj, const char* key, bool required)
{
    if (!obj.contains(key)) {
        if (required) src.fail(key, "missing; give six rates or \"reference\"");
        return RateSet::reference_extracted();
    }
    const json& r = obj.at(key);
    if (r.is_string()) {
        if (r.get<std::string>() != "reference") src.fail(key, "the only named rate set is \"reference\"");
        return RateSet::reference_extracted();
    }
    check_keys(src, r, key, {"Gamma21", "gamma21", "Gamma32", "gamma32", "Gamma31", "gamma31"});
    std::array<double, 6> v{};
    for (std::size_t k = 0; k < 6; ++k)
        v[k] = units::from_mhz(get_nonnegative(src, r, key, rate_names[k]));
    return RateSet::from_array(v);
}

std::pair<double, double> parse_rabi(const Source& src, const json& obj, const std::string& path)
{
    const std::string field = join(path, "rabi_mhz");
    if (!obj.contains("rabi_mhz")) src.fail(field, "missing; expected {\"first\": .., \"second\": ..}");
    const json& r = obj.at("rabi_mhz");
    check_keys(src, r, field, {"first", "second"});
    return {get_nonnegative(src, r, field, "first"), get_nonnegative(src, r, field, "second")};
}

Axis parse_axis(const Source& src, const json& grid, const char* key)
{
    const std::string field = join("grid", key);
    if (!grid.contains(key)) return {units::from_mhz(-100.0), units::from_mhz(100.0), 201};
    const json& a = grid.at(key);
    check_keys(src, a, field, {"min", "max", "points"});
    const double lo = get_number(src, a, field, "min", -100.0);
    const double hi = get_number(src, a, field, "max", 100.0);
    if (!(hi > lo)) src.fail(join(field, "max"), "must exceed min");
    const long n = get_integer(src, a, field, "points", 201, 2);
    return {units::from_mhz(lo), units::from_mhz(hi), static_cast<int>(n)};
}

SteadyStateOptions parse_solver(const Source& src, const json& obj)
{
    SteadyStateOptions s;
    if (!obj.contains("solver")) return s;
    const json& j = obj.at("solver");
    check_keys(src, j, "solver", {"residual_tolerance", "refinement_steps", "rank_threshold", "positivity"});
    s.residual_tolerance = get_nonnegative(src, j, "solver", "residual_tolerance", s.residual_tolerance);
    s.rank_threshold = get_nonnegative(src, j, "solver", "rank_threshold", s.rank_threshold);
    s.refinement_steps = static_cast<int>(get_integer(src, j, "solver", "refinement_steps", s.refinement_steps, 0));
    const std::string p = get_string(src, j, "solver", "positivity", "record");
    if (p == "record") s.positivity = PositivityCheck::record;
    else if (p == "enforce") s.positivity = PositivityCheck::enforce;
    else src.fail("solver.positivity", "expected \"record\" or \"enforce\"");
    return s;
}

json solver_json(const SteadyStateOptions& s)
{
    return {{"residual_tolerance", s.residual_tolerance},
            {"refinement_steps", s.refinement_steps},
            {"rank_threshold", s.rank_threshold},
            {"positivity", s.positivity == PositivityCheck::record ? "record" : "enforce"}};
}

json rates_json(const RateSet& r)
{
    json j = json::object();
    const auto v = r.as_array();
    for (std::size_t k = 0; k < 6; ++k) j[rate_names[k]] = units::to_mhz(v[k]);
    return j;
}

json axis_json(const Axis& a)
{
    return {{"min", units::to_mhz(a.min)}, {"max", units::to_mhz(a.max)}, {"points", a.points}};
}

std::string transition_label(Transition t)
{
    return std::string(to_string(t));
}

} // namespace

ScanConfig parse_scan_config(const std::string& text, const std::string& file)
{
    const Source src(text, file);
    json root = src.parse();
    if (root.is_object() && root.contains("sidecar")) {
        if (!root.contains("config")) src.fail("config", "sidecar has no config member");
        root = root.at("config");
    }
    check_keys(src, root, "",
               {"name", "scheme", "hamiltonian", "rabi_mhz", "rates_mhz", "grid", "solver",
                "failure_budget", "synthetic"});

    ScanConfig c;
    c.name = get_string(src, root, "", "name", "map");
    if (c.name.empty() || c.name.find('/') != std::string::npos)
        src.fail("name", "must be a non-empty file stem without '/'");
    c.drive.scheme = parse_scheme(src, root, "");
    const auto [r1, r2] = parse_rabi(src, root, "");
    c.drive.rabi_first = units::from_mhz(r1);
    c.drive.rabi_second = units::from_mhz(r2);
    c.options.model.hamiltonian = parse_mode(src, root);
    c.rates = parse_rates(src, root, "rates_mhz", false);
    c.options.solver = parse_solver(src, root);

    if (root.contains("grid")) {
        const json& g = root.at("grid");
        check_keys(src, g, "grid", {"delta1_mhz", "delta2_mhz"});
        c.grid = {parse_axis(src, g, "delta1_mhz"), parse_axis(src, g, "delta2_mhz")};
    } else {
        c.grid = DetuningGrid::symmetric(units::from_mhz(100.0));
    }

    c.failure_budget = get_nonnegative(src, root, "", "failure_budget", 1e-3);
    if (c.failure_budget > 1.0) src.fail("failure_budget", "is a fraction of cells, must be <= 1");

    if (root.contains("synthetic")) {
        const json& s = root.at("synthetic");
        check_keys(src, s, "synthetic", {"gain", "noise_rel", "seed"});
        SyntheticNoise n;
        n.gain = get_number(src, s, "synthetic", "gain", 1.0);
        if (!(n.gain > 0.0)) src.fail("synthetic.gain", "must be > 0");
        n.noise_rel = get_nonnegative(src, s, "synthetic", "noise_rel", 0.0);
        n.seed = static_cast<std::uint64_t>(get_integer(src, s, "synthetic", "seed", 1, 0));
        c.synthetic = n;
    }
    return c;
}

ScanConfig load_scan_config(const std::filesystem::path& path)
{
    return parse_scan_config(read_text_file(path), path.string());
}

json to_json(const ScanConfig& c)
{
    json j;
    j["name"] = c.name;
    j["scheme"] = std::string(to_string(c.drive.scheme));
    j["hamiltonian"] = std::string(to_string(c.options.model.hamiltonian));
    j["rabi_mhz"] = {{"first", units::to_mhz(c.drive.rabi_first)},
                     {"second", units::to_mhz(c.drive.rabi_second)}};
    j["rates_mhz"] = rates_json(c.rates);
    j["grid"] = {{"delta1_mhz", axis_json(c.grid.axis1)}, {"delta2_mhz", axis_json(c.grid.axis2)}};
    j["solver"] = solver_json(c.options.solver);
    j["failure_budget"] = c.failure_budget;
    if (c.synthetic) {
        j["synthetic"] = {{"gain", c.synthetic->gain},
                          {"noise_rel", c.synthetic->noise_rel},
                          {"seed", c.synthetic->seed}};
    }
    return j;
}

FitConfig parse_fit_config(const std::string& text, const std::string& file,
                           const std::filesystem::path& base_dir)
{
    const Source src(text, file);
    const json root = src.parse();
    check_keys(src, root, "", {"name", "datasets", "initial_rates_mhz", "hamiltonian", "solver", "fit"});

    FitConfig c;
    c.name = get_string(src, root, "", "name", "fit");
    if (c.name.empty() || c.name.find('/') != std::string::npos)
        src.fail("name", "must be a non-empty file stem without '/'");
    if (!root.contains("datasets") || !root.at("datasets").is_array())
        src.fail("datasets", "missing; expected a list of datasets");
    const json& ds = root.at("datasets");
    if (ds.empty()) src.fail("datasets", "empty dataset list, nothing to fit");
    for (std::size_t k = 0; k < ds.size(); ++k) {
        const std::string path = "datasets[" + std::to_string(k) + "]";
        check_keys(src, ds[k], path, {"csv", "scheme", "rabi_mhz"});
        FitDatasetSpec d;
        const std::filesystem::path csv = get_string(src, ds[k], path, "csv");
        d.csv = csv.is_absolute() || base_dir.empty() ? csv : base_dir / csv;
        d.scheme = parse_scheme(src, ds[k], path);
        std::tie(d.rabi_first_mhz, d.rabi_second_mhz) = parse_rabi(src, ds[k], path);
        c.datasets.push_back(d);
    }
    c.initial_rates = parse_rates(src, root, "initial_rates_mhz", true);
    for (double r : c.initial_rates.as_array())
        if (!(r > 0.0)) src.fail("initial_rates_mhz", "initial rates must be > 0 for the log-space search");
    c.scan.model.hamiltonian = parse_mode(src, root);
    c.scan.solver = parse_solver(src, root);

    if (root.contains("fit")) {
        const json& f = root.at("fit");
        check_keys(src, f, "fit",
                   {"max_evaluations", "cost_tolerance", "simplex_tolerance", "initial_step", "restarts",
                    "seed", "confidence"});
        FitOptions& o = c.options;
        o.max_evaluations = get_integer(src, f, "fit", "max_evaluations", o.max_evaluations, 1);
        o.cost_tolerance = get_nonnegative(src, f, "fit", "cost_tolerance", o.cost_tolerance);
        o.simplex_tolerance = get_nonnegative(src, f, "fit", "simplex_tolerance", o.simplex_tolerance);
        o.initial_step = get_nonnegative(src, f, "fit", "initial_step", o.initial_step);
        o.restarts = static_cast<int>(get_integer(src, f, "fit", "restarts", o.restarts, 0));
        o.seed = static_cast<std::uint64_t>(get_integer(src, f, "fit", "seed", static_cast<long>(o.seed), 0));
        if (f.contains("confidence")) {
            if (!f.at("confidence").is_boolean()) src.fail("fit.confidence", "expected true or false");
            o.confidence = f.at("confidence").get<bool>();
        }
    }
    return c;
}

FitConfig load_fit_config(const std::filesystem::path& path)
{
    return parse_fit_config(read_text_file(path), path.string(), path.parent_path());
}

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_map_csv(const std::filesystem::path& path, const EmissionMap& map, const Eigen::MatrixXd& values)
{
    const ScanMeta& m = map.meta;
    std::ostringstream out;
    out << "# meta code_version=" << m.code_version << "\n";
    out << "# meta scheme=" << to_string(m.drive.scheme)
        << " emission=" << transition_label(emission_transition(m.drive.scheme)) << "\n";
    out << "# meta hamiltonian=" << to_string(m.options.model.hamiltonian) << "\n";
    out << "# meta rabi_first_MHz=" << format_double(units::to_mhz(m.drive.rabi_first))
        << " rabi_second_MHz=" << format_double(units::to_mhz(m.drive.rabi_second)) << "\n";
    out << "# meta rates_MHz";
    const auto r = m.rates.as_array();
    for (std::size_t k = 0; k < 6; ++k) out << " " << rate_names[k] << "=" << format_double(units::to_mhz(r[k]));
    out << "\n";
    out << "# meta failed_cells=" << map.errors.size() << "\n";
    out << "delta1_MHz,delta2_MHz,photon_rate_per_us\n";
    for (int i = 0; i < map.grid.axis1.points; ++i) {
        const std::string d1 = format_double(units::to_mhz(map.grid.axis1.value(i)));
        for (int j = 0; j < map.grid.axis2.points; ++j) {
            out << d1 << "," << format_double(units::to_mhz(map.grid.axis2.value(j))) << ","
                << format_double(values(i, j)) << "\n";
        }
    }
    write_text_file(path, out.str());
}

void write_map_csv(const std::filesystem::path& path, const EmissionMap& map)
{
    write_map_csv(path, map, map.values);
}

namespace {

double parse_field(const std::string& file, int line, std::string_view s, const char* column)
{
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ConfigError(file, line, column, "not a number: '" + std::string(s) + "'");
    return v;
}

} // namespace

CsvMap read_map_csv(const std::filesystem::path& path)
{
    const std::string file = path.string();
    std::ifstream in(path);
    if (!in) throw ConfigError(file, 0, "", "cannot open data file");

    CsvMap out;
    std::vector<std::array<double, 3>> rows;
    std::string line;
    int lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.rfind("#", 0) == 0) {
            if (line.rfind("# meta", 0) == 0) out.meta.push_back(line.substr(std::min<std::size_t>(7, line.size())));
            continue;
        }
        if (!header) {
            if (line != "delta1_MHz,delta2_MHz,photon_rate_per_us")
                throw ConfigError(file, lineno, "header",
                                  "expected columns delta1_MHz,delta2_MHz,photon_rate_per_us");
            header = true;
            continue;
        }
        std::array<std::string_view, 3> cols;
        std::string_view rest(line);
        for (int c = 0; c < 3; ++c) {
            const auto comma = rest.find(',');
            if ((c < 2) == (comma == std::string_view::npos))
                throw ConfigError(file, lineno, "", "expected exactly 3 comma-separated columns");
            cols[static_cast<std::size_t>(c)] = rest.substr(0, comma);
            rest = c < 2 ? rest.substr(comma + 1) : std::string_view{};
        }
        rows.push_back({parse_field(file, lineno, cols[0], "delta1_MHz"),
                        parse_field(file, lineno, cols[1], "delta2_MHz"),
                        parse_field(file, lineno, cols[2], "photon_rate_per_us")});
    }
    if (!header) throw ConfigError(file, lineno, "header", "missing column header");
    if (rows.size() < 4) throw ConfigError(file, lineno, "", "need at least a 2x2 grid");

    std::size_t n2 = 0;
    while (n2 < rows.size() && rows[n2][0] == rows[0][0]) ++n2;
    if (n2 < 2 || rows.size() % n2 != 0)
        throw ConfigError(file, 0, "", "rows do not form a rectangular grid (axis1 outer, axis2 inner)");
    const std::size_t n1 = rows.size() / n2;
    if (n1 < 2) throw ConfigError(file, 0, "", "need at least 2 points on axis1");
    out.values.resize(static_cast<Eigen::Index>(n1), static_cast<Eigen::Index>(n2));
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
            const auto& r = rows[i * n2 + j];
            if (r[0] != rows[i * n2][0] || r[1] != rows[j][1])
                throw ConfigError(file, 0, "", "rows do not form a rectangular grid (axis1 outer, axis2 inner)");
            out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r[2];
        }
    }
    out.grid.axis1 = {units::from_mhz(rows.front()[0]), units::from_mhz(rows.back()[0]), static_cast<int>(n1)};
    out.grid.axis2 = {units::from_mhz(rows.front()[1]), units::from_mhz(rows[n2 - 1][1]), static_cast<int>(n2)};
    try {
        out.grid.validate();
    } catch (const std::exception& e) {
        throw ConfigError(file, 0, "", e.what());
    }
    return out;
}

json map_sidecar(const ScanConfig& config, const EmissionMap& map)
{
    const Transition t = emission_transition(config.drive.scheme);
    double max_sigma = 0.0;
    for (Eigen::Index k = 0; k < map.sigma.size(); ++k)
        if (!std::isnan(map.sigma(k).real())) max_sigma = std::max(max_sigma, std::abs(map.sigma(k)));

    json errors = json::array();
    for (const CellError& e : map.errors) {
        errors.push_back({{"i", e.i},
                          {"j", e.j},
                          {"delta1_MHz", units::to_mhz(map.grid.axis1.value(e.i))},
                          {"delta2_MHz", units::to_mhz(map.grid.axis2.value(e.j))},
                          {"kind", std::string(to_string(e.kind))},
                          {"reason", e.reason}});
    }

    json j;
    j["sidecar"] = "wavemix-map";
    j["code_version"] = map.meta.code_version;
    j["config"] = to_json(config);
    j["emission_transition"] = transition_label(t);
    j["units"] = {{"frequencies", "MHz (f = omega / 2 pi)"},
                  {"photon_rate", config.synthetic ? "arbitrary (gain x photons/us)" : "photons/us"}};
    j["axes"] = {{"delta1", transition_label(driven_transitions(config.drive.scheme)[0])},
                 {"delta2", transition_label(driven_transitions(config.drive.scheme)[1])}};
    j["summary"] = {{"cells", map.values.size()},
                    {"failed_cells", map.errors.size()},
                    {"max_photon_rate_per_us", map.max_value()},
                    {"max_abs_sigma", max_sigma},
                    {"photon_rate_bound_per_us", config.rates.relaxation(t) / 8.0},
                    {"nonpositive_cells", map.nonpositive_cells},
                    {"worst_min_eigenvalue", map.worst_min_eigenvalue}};
    j["errors"] = errors;
    j["rate_warnings"] = config.rates.validity_warnings();
    j["positivity_warnings"] = config.rates.complete_positivity_warnings();
    return j;
}

void write_pgm(const std::filesystem::path& path, const Eigen::MatrixXd& values, bool log_scale)
{
    double top = 0.0;
    for (Eigen::Index k = 0; k < values.size(); ++k)
        if (std::isfinite(values(k))) top = std::max(top, values(k));

    constexpr double decades = 6.0;
    const auto rows = values.rows();
    const auto cols = values.cols();
    std::string pixels(static_cast<std::size_t>(rows * cols), '\0');
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            const double v = values(i, j);
            double level = 0.0;
            if (std::isfinite(v) && top > 0.0 && v > 0.0) {
                level = log_scale ? std::max(0.0, 1.0 + std::log10(v / top) / decades) : v / top;
            }
            const auto byte = static_cast<unsigned char>(std::lround(255.0 * std::clamp(level, 0.0, 1.0)));
            pixels[static_cast<std::size_t>((rows - 1 - i) * cols + j)] = static_cast<char>(byte);
        }
    }
    std::ostringstream out;
    out << "P5\n" << cols << " " << rows << "\n255\n" << pixels;
    write_text_file(path, out.str());
}

std::string fnv1a_hex(const std::string& bytes)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json fit_report(const FitConfig& config, const FitProblem& problem, const FitResult& result,
                const std::string& config_hash)
{
    auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };

    json j;
    j["report"] = "wavemix-fit";
    j["code_version"] = WAVEMIX_VERSION;
    j["config_hash"] = "fnv1a64:" + config_hash;
    j["status"] = std::string(to_string(result.status));
    j["partial"] = result.status != FitStatus::converged;
    j["rates_mhz"] = rates_json(result.rates);
    j["initial_rates_mhz"] = rates_json(config.initial_rates);
    j["residual"] = finite_or_null(result.residual);
    j["evaluations"] = result.evaluations;
    j["iterations"] = result.iterations;
    j["restarts"] = result.restarts_used;
    j["hamiltonian"] = std::string(to_string(config.scan.model.hamiltonian));

    json gains = json::object();
    json gain_hw = json::object();
    for (Transition t : problem.fitted_transitions()) {
        const std::string key = "G" + transition_label(t);
        gains[key] = result.gains[t];
        if (result.gain_half_widths) gain_hw[key] = finite_or_null((*result.gain_half_widths)[t]);
    }
    j["gains"] = gains;
    if (result.rate_half_widths) {
        json hw = json::object();
        for (std::size_t k = 0; k < 6; ++k) hw[rate_names[k]] = finite_or_null((*result.rate_half_widths)[k]);
        // relative one-sigma half-widths; null marks a direction the data do not constrain
        j["rate_half_widths_rel"] = hw;
        j["gain_half_widths_rel"] = gain_hw;
    }

    json ds = json::array();
    for (std::size_t k = 0; k < config.datasets.size(); ++k) {
        const FitDatasetSpec& d = config.datasets[k];
        const DetuningGrid& g = problem.datasets[k].grid;
        ds.push_back({{"csv", d.csv.string()},
                      {"scheme", std::string(to_string(d.scheme))},
                      {"emission_transition", transition_label(emission_transition(d.scheme))},
                      {"rabi_mhz", {{"first", d.rabi_first_mhz}, {"second", d.rabi_second_mhz}}},
                      {"grid", {{"delta1_mhz", axis_json(g.axis1)}, {"delta2_mhz", axis_json(g.axis2)}}}});
    }
    j["datasets"] = ds;
    const FitOptions& o = config.options;
    j["options"] = {{"max_evaluations", o.max_evaluations}, {"cost_tolerance", o.cost_tolerance},
                    {"simplex_tolerance", o.simplex_tolerance}, {"initial_step", o.initial_step},
                    {"restarts", o.restarts}, {"seed", o.seed}, {"confidence", o.confidence}};
    return j;
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string(), 0, "", "cannot open file");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

} // namespace wavemix
