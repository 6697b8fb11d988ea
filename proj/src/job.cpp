#include "wshift/job.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <ostream>

namespace wshift {

namespace {

constexpr std::array kCommands{"radii", "membership", "scan", "boundary", "nshift", "verify-inverse", "oracle", "compare"};

int int_field(const json& j, const char* name, const std::string& where) {
    const auto& v = j.at(name);
    if (!v.is_number_integer()) throw ConfigError(where + "." + name + ": expected an integer");
    const auto x = v.get<std::int64_t>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
        throw ConfigError(where + "." + name + ": out of range");
    return static_cast<int>(x);
}

double real_field(const json& j, const char* name, const std::string& where) {
    const auto& v = j.at(name);
    if (!v.is_number() || !std::isfinite(v.get<double>())) throw ConfigError(where + "." + name + ": expected a finite number");
    return v.get<double>();
}

void allow_only(const json& j, const std::string& where, std::initializer_list<const char*> names) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : j.items())
        if (std::none_of(names.begin(), names.end(), [&](const char* n) { return key == n; }))
            throw ConfigError(where + ": unknown field \"" + key + "\"");
}

std::string infer_format(const OutputSpec& o) {
    if (!o.format.empty()) return o.format;
    const auto dot = o.path.rfind('.');
    if (dot != std::string::npos) {
        const auto ext = o.path.substr(dot + 1);
        if (ext == "csv" || ext == "json" || ext == "pgm") return ext;
    }
    throw ConfigError("cannot infer output format for \"" + o.path + "\"; give one of csv, json, pgm");
}

// Everything a command can emit, keyed by format. The first entry is what
// goes to stdout when no output files are configured.
struct Products {
    std::string primary;
    std::map<std::string, std::string> by_format;

    void add(const std::string& format, std::string text) {
        if (primary.empty()) primary = format;
        by_format.emplace(format, std::move(text));
    }
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json lambda_json(cplx z) { return json::array({z.real(), z.imag()}); }

const std::vector<cplx>& require_lambdas(const JobConfig& c) {
    if (c.lambdas.empty()) throw ConfigError(c.command + ": needs \"lambda\" or \"lambdas\"");
    return c.lambdas;
}

json radii_one(const ShiftModel& m, cplx lambda, int k_max) {
    const RadiusEvaluator ev(m, k_max);
    const auto rp = ev.r_plus(lambda);
    const auto rm = ev.r_minus(lambda);
    json j;
    j["r_plus"] = real_to_json(rp.value);
    j["r_minus"] = real_to_json(rm.value);
    j["method"] = to_string(rp.method);
    j["r_minus_method"] = to_string(rm.method);
    j["lambda"] = lambda_json(lambda);
    j["k_used"] = rp.k_used;
    j["uncertainty"] = json::array({real_to_json(rp.uncertainty), real_to_json(rm.uncertainty)});
    return j;
}

json per_component(const ShiftModel& model, const std::function<json(const ShiftModel&)>& f) {
    if (model.step() == 1) return f(model);
    json parts = json::array();
    for (int r = 0; r < model.step(); ++r) {
        json p = f(model.residue_model(r));
        p["residue"] = r;
        parts.push_back(std::move(p));
    }
    return json{{"components", std::move(parts)}};
}

json singles_or_list(const std::vector<json>& items) {
    if (items.size() == 1) return items.front();
    return json(items);
}

Products cmd_radii(const JobConfig& c) {
    std::vector<json> items;
    for (const auto& lambda : require_lambdas(c))
        items.push_back(per_component(*c.model, [&](const ShiftModel& m) { return radii_one(m, lambda, c.k_max); }));
    Products p;
    p.add("json", dump(singles_or_list(items)));
    return p;
}

Products cmd_membership(const JobConfig& c) {
    const double eps = c.eps.value_or(default_eps(c.k_max));
    std::vector<json> items;
    for (const auto& lambda : require_lambdas(c)) {
        bool any = false;
        json j = per_component(*c.model, [&](const ShiftModel& m) {
            const auto r = membership(m, lambda, c.k_max, eps);
            any = any || r.in_spectrum;
            return membership_to_json(r);
        });
        if (c.model->step() > 1) {
            j["lambda"] = lambda_json(lambda);
            j["in_spectrum"] = any;
        }
        j["eps"] = eps;
        items.push_back(std::move(j));
    }
    Products p;
    p.add("json", dump(singles_or_list(items)));
    return p;
}

RegionGrid run_scan(const JobConfig& c, bool force_union) {
    const auto params = scan_params(c);
    if (force_union || c.model->step() > 1) return decompose_union(*c.model, params);
    return scan(*c.model, params);
}

Products grid_products(const RegionGrid& g) {
    Products p;
    p.add("csv", grid_to_csv(g));
    p.add("json", dump(grid_to_json(g)));
    p.add("pgm", grid_to_pgm(g));
    return p;
}

json verify_one(const ShiftModel& m, cplx lambda, const JobConfig& c) {
    const RadiusEvaluator ev(m, c.k_max);
    json j;
    j["lambda"] = lambda_json(lambda);
    const double rp = ev.r_plus(lambda).value;
    const double rm = ev.invertible() ? ev.r_minus(lambda).value : std::numeric_limits<double>::infinity();
    j["r_plus"] = real_to_json(rp);
    j["r_minus"] = real_to_json(rm);
    std::vector<SeriesDirection> order;
    if (series_admissible(ev, lambda, SeriesDirection::forward)) order.push_back(SeriesDirection::forward);
    if (series_admissible(ev, lambda, SeriesDirection::backward)) order.push_back(SeriesDirection::backward);
    if (order.size() == 2 && rm < rp) std::swap(order[0], order[1]);
    for (const auto dir : order) {
        try {
            const auto series = dir == SeriesDirection::forward ? build_forward(m, lambda, c.series_length)
                                                                : build_backward(m, lambda, c.series_length);
            const auto cols = series.columns();
            std::vector<Index> probes;
            const Index mid = (cols.first + cols.last) / 2;
            for (Index i : {cols.first + c.series_length, mid, cols.last - c.series_length - 1})
                if (i >= cols.first && i + 1 <= cols.last) probes.push_back(i);
            std::sort(probes.begin(), probes.end());
            probes.erase(std::unique(probes.begin(), probes.end()), probes.end());
            j["verified"] = true;
            j["direction"] = to_string(dir);
            j["length"] = c.series_length;
            j["rate"] = real_to_json(dir == SeriesDirection::forward ? rp : rm);
            j["tail_bound"] = real_to_json(series.tail_bound());
            j["residual"] = real_to_json(residual_identity(series, m, probes));
            j["telescoping_defect"] = real_to_json(telescoping_defect(series, m));
            return j;
        } catch (const std::domain_error& e) {
            j["build_error"] = e.what();
        }
    }
    j["verified"] = false;
    j["reason"] = order.empty() ? "no series direction converges (lambda is in the spectrum)" : "series build failed";
    return j;
}

Products cmd_verify(const JobConfig& c) {
    std::vector<json> items;
    for (const auto& lambda : require_lambdas(c))
        items.push_back(per_component(*c.model, [&](const ShiftModel& m) { return verify_one(m, lambda, c); }));
    Products p;
    p.add("json", dump(singles_or_list(items)));
    return p;
}

Products cmd_oracle(const JobConfig& c) {
    std::vector<cplx> all;
    json parts = json::array();
    for (int r = 0; r < c.model->step(); ++r) {
        const ShiftModel m = c.model->residue_model(r);
        const Index offset = c.oracle_offset.value_or(default_offset(m, c.oracle_n));
        const auto mat = truncate(m, c.oracle_n, c.oracle_boundary, offset);
        const auto ev = eigenvalues(mat);
        json part;
        part["residue"] = r;
        part["offset"] = offset;
        part["non_normality"] = non_normality(mat);
        json evj = json::array();
        for (const auto& z : ev) evj.push_back(lambda_json(z));
        part["eigenvalues"] = std::move(evj);
        if (c.box) {
            const auto g = sigma_min_grid(mat, *c.box, c.nx, c.ny, Execution::parallel, c.threads);
            json vals = json::array();
            for (const double v : g.values) vals.push_back(v);
            part["sigma_min"] = {{"box", json::array({g.box.x0, g.box.x1, g.box.y0, g.box.y1})},
                                 {"nx", g.nx},
                                 {"ny", g.ny},
                                 {"values", std::move(vals)}};
        }
        parts.push_back(std::move(part));
        all.insert(all.end(), ev.begin(), ev.end());
    }
    json j;
    j["n"] = c.oracle_n;
    j["boundary"] = to_string(c.oracle_boundary);
    j["components"] = std::move(parts);
    Products p;
    p.add("csv", eigenvalues_to_csv(all));
    p.add("json", dump(j));
    return p;
}

Products cmd_compare(const JobConfig& c) {
    const auto grid = run_scan(c, false);
    const auto boundary = extract_boundary(grid);
    OracleParams op;
    op.n = c.oracle_n;
    op.offset = c.oracle_offset;
    op.delta = c.oracle_delta;
    auto report = report_to_json(compare(*c.model, grid, boundary, op));
    report["warnings"] = grid.warnings;
    Products p;
    p.add("json", dump(report));
    return p;
}

Products dispatch(const JobConfig& c) {
    if (c.command == "radii") return cmd_radii(c);
    if (c.command == "membership") return cmd_membership(c);
    if (c.command == "scan") return grid_products(run_scan(c, false));
    if (c.command == "nshift") return grid_products(run_scan(c, true));
    if (c.command == "boundary") {
        Products p;
        p.add("json", dump(boundary_to_json(extract_boundary(run_scan(c, false)))));
        return p;
    }
    if (c.command == "verify-inverse") return cmd_verify(c);
    if (c.command == "oracle") return cmd_oracle(c);
    if (c.command == "compare") return cmd_compare(c);
    throw ConfigError("unknown command \"" + c.command + "\"");
}

}  // namespace

bool known_command(const std::string& name) {
    return std::any_of(kCommands.begin(), kCommands.end(), [&](const char* c) { return name == c; });
}

JobConfig parse_job(const json& j) {
    allow_only(j, "config",
               {"command", "model", "k_max", "eps", "threads", "lambda", "lambdas", "grid", "series", "oracle", "outputs"});
    JobConfig c;
    if (j.contains("command")) {
        if (!j["command"].is_string()) throw ConfigError("config.command: expected a string");
        c.command = j["command"].get<std::string>();
    }
    if (!j.contains("model")) throw ConfigError("config: missing field \"model\"");
    c.model = parse_model(j["model"]);
    if (j.contains("k_max")) c.k_max = int_field(j, "k_max", "config");
    if (j.contains("eps")) c.eps = real_field(j, "eps", "config");
    if (j.contains("threads")) c.threads = int_field(j, "threads", "config");
    if (j.contains("lambda") && j.contains("lambdas")) throw ConfigError("config: give either lambda or lambdas");
    if (j.contains("lambda")) c.lambdas.push_back(parse_complex(j["lambda"], "config.lambda"));
    if (j.contains("lambdas")) {
        const auto& a = j["lambdas"];
        if (!a.is_array()) throw ConfigError("config.lambdas: expected an array");
        for (std::size_t k = 0; k < a.size(); ++k)
            c.lambdas.push_back(parse_complex(a[k], "config.lambdas[" + std::to_string(k) + "]"));
    }
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        allow_only(g, "config.grid", {"box", "nx", "ny", "max_depth", "budget"});
        if (g.contains("box")) {
            const auto& b = g["box"];
            if (!b.is_array() || b.size() != 4) throw ConfigError("config.grid.box: expected [x0, x1, y0, y1]");
            std::array<double, 4> v{};
            for (std::size_t k = 0; k < 4; ++k) {
                if (!b[k].is_number()) throw ConfigError("config.grid.box: expected numbers");
                v[k] = b[k].get<double>();
            }
            c.box = Box{v[0], v[1], v[2], v[3]};
        }
        if (g.contains("nx")) c.nx = int_field(g, "nx", "config.grid");
        if (g.contains("ny")) c.ny = int_field(g, "ny", "config.grid");
        if (g.contains("max_depth")) c.max_depth = int_field(g, "max_depth", "config.grid");
        if (g.contains("budget")) {
            const auto& b = g["budget"];
            if (!b.is_number_unsigned() || b.get<std::uint64_t>() == 0)
                throw ConfigError("config.grid.budget: expected a positive integer");
            c.budget = b.get<std::size_t>();
        }
    }
    if (j.contains("series")) {
        const auto& s = j["series"];
        allow_only(s, "config.series", {"length"});
        if (s.contains("length")) c.series_length = int_field(s, "length", "config.series");
    }
    if (j.contains("oracle")) {
        const auto& o = j["oracle"];
        allow_only(o, "config.oracle", {"n", "boundary", "offset", "delta"});
        if (o.contains("n")) c.oracle_n = int_field(o, "n", "config.oracle");
        if (o.contains("boundary")) {
            const auto& b = o["boundary"];
            if (b == "zero") c.oracle_boundary = TruncationBoundary::zero;
            else if (b == "circulant") c.oracle_boundary = TruncationBoundary::circulant;
            else throw ConfigError("config.oracle.boundary: expected \"zero\" or \"circulant\"");
        }
        if (o.contains("offset")) {
            if (!o["offset"].is_number_integer()) throw ConfigError("config.oracle.offset: expected an integer");
            c.oracle_offset = o["offset"].get<Index>();
        }
        if (o.contains("delta")) c.oracle_delta = real_field(o, "delta", "config.oracle");
    }
    if (j.contains("outputs")) {
        const auto& outs = j["outputs"];
        if (!outs.is_array()) throw ConfigError("config.outputs: expected an array");
        for (const auto& o : outs) {
            allow_only(o, "config.outputs[]", {"path", "format"});
            if (!o.contains("path") || !o["path"].is_string()) throw ConfigError("config.outputs[]: missing path");
            OutputSpec spec{o["path"].get<std::string>(), ""};
            if (o.contains("format")) {
                if (!o["format"].is_string()) throw ConfigError("config.outputs[].format: expected a string");
                spec.format = o["format"].get<std::string>();
            }
            c.outputs.push_back(std::move(spec));
        }
    }
    return c;
}

void validate(const JobConfig& c) {
    if (!known_command(c.command)) throw ConfigError("unknown or missing command \"" + c.command + "\"");
    if (!c.model) throw ConfigError("no model given");
    if (c.k_max < 8 || c.k_max > 1 << 16) throw ConfigError("k_max must be in [8, 65536]");
    if (c.eps && !(*c.eps >= 0.0 && *c.eps < 1.0)) throw ConfigError("eps must lie in [0, 1)");
    if (c.threads < 0 || c.threads > 1024) throw ConfigError("threads must be in [0, 1024]");
    if (c.nx < 1 || c.nx > 4096 || c.ny < 1 || c.ny > 4096) throw ConfigError("grid resolution must be in [1, 4096]");
    if (c.max_depth < 0 || c.max_depth > 8) throw ConfigError("grid max_depth must be in [0, 8]");
    if (c.box && !(c.box->x1 > c.box->x0 && c.box->y1 > c.box->y0)) throw ConfigError("grid box must have positive extent");
    if (c.series_length < 1 || c.series_length > 1 << 16) throw ConfigError("series length must be in [1, 65536]");
    if (c.oracle_n < 2 || c.oracle_n > kDenseCap) throw ConfigError("oracle n must be in [2, 2048]");
    if (c.oracle_delta && !(*c.oracle_delta > 0.0)) throw ConfigError("oracle delta must be positive");
    for (const auto& o : c.outputs) {
        const auto f = infer_format(o);
        if (f != "csv" && f != "json" && f != "pgm") throw ConfigError("unsupported output format \"" + f + "\"");
    }
}

ScanParams scan_params(const JobConfig& c) {
    ScanParams p;
    p.box = c.box;
    p.nx = c.nx;
    p.ny = c.ny;
    p.k_max = c.k_max;
    p.eps = c.eps;
    p.max_depth = c.max_depth;
    p.cell_budget = c.budget;
    p.threads = c.threads;
    return p;
}

ExitCode run(const JobConfig& config, std::ostream& out, std::ostream& err) {
    try {
        validate(config);
        const Products products = dispatch(config);
        std::vector<std::pair<std::string, const std::string*>> files;
        for (const auto& o : config.outputs) {
            const auto f = infer_format(o);
            const auto it = products.by_format.find(f);
            if (it == products.by_format.end())
                throw ConfigError("command " + config.command + " cannot emit format " + f);
            files.emplace_back(o.path, &it->second);
        }
        if (files.empty()) {
            const auto f = config.stdout_format.empty() ? products.primary : config.stdout_format;
            const auto it = products.by_format.find(f);
            if (it == products.by_format.end()) throw ConfigError("command " + config.command + " cannot emit format " + f);
            const auto& text = it->second;
            out.write(text.data(), static_cast<std::streamsize>(text.size()));
            out.flush();
        }
        for (const auto& [path, text] : files) write_file_atomic(path, *text);
        return ExitCode::ok;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return ExitCode::config_error;
    } catch (const BudgetExceeded& e) {
        err << "budget exceeded: " << e.what() << "\n";
        return ExitCode::budget_exceeded;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return ExitCode::config_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return ExitCode::failure;
    }
}

}  // namespace wshift
