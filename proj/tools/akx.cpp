// Batch front door: reads a JSON config, dispatches to the library
// operations, and emits machine-readable results. Exit codes: 0 success,
// 1 config error, 2 method failure (non-convergence, refused scaling,
// failed certification) with the report still written.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "akx/akx.hpp"

namespace {

using akx::cplx;
using akx::ojson;

struct Options {
    std::string config_path;
    std::string out_path;
    std::string format = "json";
    long long seed_override = -1;
    bool quiet = false;
};

akx::EvalTuple tuple_from_json(const nlohmann::json& j, const akx::AlgebraDescriptor& d,
                               const std::string& where) {
    akx::require_keys(j, where, {"z", "A", "a"});
    akx::EvalTuple t;
    t.z = akx::cplx_from_json(j.at("z"), where + ".z");
    t.arg = akx::AlgebraElement(d, akx::coords_from_json(j.at("A"), where + ".A"));
    t.a = akx::DualFunctional(d, akx::coords_from_json(j.at("a"), where + ".a"));
    return t;
}

akx::TruncationPolicy policy_from_json(const nlohmann::json& j) {
    akx::require_keys(j, "truncation", {"N", "tail_tol"}, {"max_terms"});
    akx::TruncationPolicy pol;
    pol.order = j.at("N").get<int>();
    pol.tail_tol = j.at("tail_tol").get<double>();
    pol.max_terms = j.contains("max_terms") ? j.at("max_terms").get<int>() : std::max(256, pol.order);
    pol.validate();
    return pol;
}

ojson weak_to_json(const akx::EvalWeakResult& r) {
    ojson j;
    j["value"] = akx::cplx_to_json(r.value);
    j["tail_bound"] = r.tail_bound;
    j["terms"] = r.terms_used;
    j["converged"] = r.converged;
    return j;
}

ojson series_value_to_json(const akx::SeriesKernelValue& r) {
    ojson j;
    j["value"] = akx::cplx_to_json(r.value);
    j["tail_bound"] = r.tail_bound;
    j["terms"] = r.terms_used;
    j["converged"] = r.converged;
    return j;
}

int run_eval(const nlohmann::json& cfg, ojson& out) {
    akx::require_keys(cfg, "config", {"command", "algebra", "function", "A", "truncation"},
                      {"z", "a", "level"});
    const auto d = akx::descriptor_from_json(cfg.at("algebra"));
    const auto f = akx::function_from_json(cfg.at("function"));
    const auto pol = policy_from_json(cfg.at("truncation"));
    const cplx z = cfg.contains("z") ? akx::cplx_from_json(cfg.at("z"), "z") : cplx{0.0, 0.0};
    const double level = cfg.contains("level") ? cfg.at("level").get<double>() : 0.0;
    const akx::AlgebraElement arg(d, akx::coords_from_json(cfg.at("A"), "A"));

    const auto res = akx::eval_ext(f, z, arg, pol, level);
    out["command"] = "eval";
    out["value"] = akx::element_to_json(res.value);
    out["tail_bound"] = res.tail_bound;
    out["terms"] = res.terms_used;
    out["converged"] = res.converged;
    out["exact"] = res.exact;

    bool weak_ok = true;
    if (cfg.contains("a")) {
        const akx::DualFunctional a(d, akx::coords_from_json(cfg.at("a"), "a"));
        const auto weak = akx::eval_weak(f, z, arg, a, pol, level);
        out["weak"] = weak_to_json(weak);
        weak_ok = weak.converged;
    }
    return res.converged && weak_ok ? 0 : 2;
}

int run_jet(const nlohmann::json& cfg, ojson& out) {
    akx::require_keys(cfg, "config", {"command", "function", "N"}, {"z"});
    const auto f = akx::function_from_json(cfg.at("function"));
    const cplx z = cfg.contains("z") ? akx::cplx_from_json(cfg.at("z"), "z") : cplx{0.0, 0.0};
    const int n = cfg.at("N").get<int>();
    const auto jet = akx::jet_of(f, z, n);
    out["command"] = "jet";
    out["z"] = akx::cplx_to_json(z);
    out["N"] = n;
    out["entries"] = akx::coords_to_json(jet.entries);
    out["exact"] = true;  // recentering is exact on stored coefficients
    return 0;
}

int run_kernel(const nlohmann::json& cfg, ojson& out) {
    if (!cfg.contains("op")) throw std::invalid_argument("kernel command requires an 'op'");
    const auto op = cfg.at("op").get<std::string>();
    out["command"] = "kernel";
    out["op"] = op;

    if (op == "eval" || op == "derivative" || op == "script_block" || op == "radius") {
        akx::require_keys(cfg, "config", {"command", "op", "kernel", "z", "w"}, {"n", "m", "N"});
        const auto k = akx::kernel_from_json(cfg.at("kernel"));
        const cplx z = akx::cplx_from_json(cfg.at("z"), "z");
        const cplx w = akx::cplx_from_json(cfg.at("w"), "w");
        if (op == "eval") {
            const auto v = akx::kernel_eval(k, z, w);
            out["value"] = akx::cplx_to_json(v.value(0, 0));
            out["tail_bound"] = v.tail_bound;
        } else if (op == "derivative") {
            const int n = cfg.at("n").get<int>(), m = cfg.at("m").get<int>();
            out["block"] = akx::mat_to_json(akx::derivative_kernel(k, z, w, n, m));
            out["exact"] = true;  // finite reindexing of the stored grid
        } else if (op == "script_block") {
            const auto blk = akx::script_k_block(k, z, w, cfg.at("N").get<int>());
            out["blocks"] = akx::mat_to_json(blk.blocks);
            out["bound"] = blk.bound;
            out["M"] = blk.m_used;
            out["C"] = blk.big_c;
        } else {
            const auto est = akx::radius_estimate(k, z, w);
            if (std::isfinite(est.m0))
                out["M0"] = est.m0;
            else
                out["M0"] = "inf";
            out["C"] = est.big_c;
        }
        return 0;
    }

    if (op == "fock_extended") {
        akx::require_keys(cfg, "config",
                          {"command", "op", "algebra", "left", "right", "truncation"}, {"level"});
        const auto d = akx::descriptor_from_json(cfg.at("algebra"));
        const auto pol = policy_from_json(cfg.at("truncation"));
        const auto ta = tuple_from_json(cfg.at("left"), d, "left");
        const auto tb = tuple_from_json(cfg.at("right"), d, "right");
        const double level = cfg.contains("level") ? cfg.at("level").get<double>() : 0.0;
        const auto v = akx::fock_extended(ta, tb, pol, level);
        out["result"] = series_value_to_json(v);
        return v.converged ? 0 : 2;
    }

    if (op == "extended" || op == "scaled") {
        akx::require_keys(cfg, "config",
                          {"command", "op", "kernel", "algebra", "left", "right", "N"},
                          {"level", "M", "z", "w"});
        const auto k = akx::kernel_from_json(cfg.at("kernel"));
        const auto d = akx::descriptor_from_json(cfg.at("algebra"));
        const int order = cfg.at("N").get<int>();
        const double level = cfg.contains("level") ? cfg.at("level").get<double>() : 0.0;
        const auto ta = tuple_from_json(cfg.at("left"), d, "left");
        const auto tb = tuple_from_json(cfg.at("right"), d, "right");
        for (const auto* t : {&ta, &tb}) {
            const auto rep = akx::ell2_check(t->a, t->arg, level);
            if (!rep.summable) throw akx::method_error("l2 certification failed for a tuple");
        }
        const auto xa = akx::power_x_series(ta.z, ta.arg, ta.a, order, level);
        const auto xb = akx::power_x_series(tb.z, tb.arg, tb.a, order, level);
        if (op == "extended") {
            const auto v = akx::extended_kernel(k, xa, xb, order);
            out["value"] = akx::cplx_to_json(v.value);
            out["tail_bound"] = v.tail_bound;
            return std::isfinite(v.tail_bound) ? 0 : 2;
        }
        const cplx z = cfg.contains("z") ? akx::cplx_from_json(cfg.at("z"), "z") : ta.z;
        const cplx w = cfg.contains("w") ? akx::cplx_from_json(cfg.at("w"), "w") : tb.z;
        const double m_scale = cfg.at("M").get<double>();
        const auto v = akx::scaled_kernel(k, z, w, m_scale, xa, xb, order);
        out["value"] = akx::cplx_to_json(v.value);
        out["tail_bound"] = v.tail_bound;
        out["M"] = m_scale;
        return 0;
    }

    if (op == "matrix_trace") {
        akx::require_keys(cfg, "config",
                          {"command", "op", "algebra", "a", "A", "z", "b", "B", "w", "truncation"},
                          {});
        const auto d = akx::descriptor_from_json(cfg.at("algebra"));
        const auto pol = policy_from_json(cfg.at("truncation"));
        const auto v = akx::matrix_trace_kernel(
            akx::DualFunctional(d, akx::coords_from_json(cfg.at("a"), "a")),
            akx::AlgebraElement(d, akx::coords_from_json(cfg.at("A"), "A")),
            akx::cplx_from_json(cfg.at("z"), "z"),
            akx::DualFunctional(d, akx::coords_from_json(cfg.at("b"), "b")),
            akx::AlgebraElement(d, akx::coords_from_json(cfg.at("B"), "B")),
            akx::cplx_from_json(cfg.at("w"), "w"), pol);
        out["result"] = series_value_to_json(v);
        return v.converged ? 0 : 2;
    }

    if (op == "quaternion") {
        akx::require_keys(cfg, "config",
                          {"command", "op", "a", "p", "t", "b", "s", "q", "truncation"}, {});
        const auto d = akx::AlgebraDescriptor::quaternion();
        const auto pol = policy_from_json(cfg.at("truncation"));
        const auto v = akx::quaternion_kernel(
            akx::DualFunctional(d, akx::coords_from_json(cfg.at("a"), "a")),
            akx::AlgebraElement(d, akx::coords_from_json(cfg.at("p"), "p")),
            cfg.at("t").get<double>(),
            akx::DualFunctional(d, akx::coords_from_json(cfg.at("b"), "b")),
            akx::AlgebraElement(d, akx::coords_from_json(cfg.at("s"), "s")),
            cfg.at("q").get<double>(), pol);
        out["result"] = series_value_to_json(v);
        return v.converged ? 0 : 2;
    }

    if (op == "grassmann") {
        akx::require_keys(cfg, "config",
                          {"command", "op", "kernel", "algebra", "z_body", "z_soul", "w_body",
                           "w_soul"},
                          {"a", "b"});
        const auto k = akx::kernel_from_json(cfg.at("kernel"));
        const auto d = akx::descriptor_from_json(cfg.at("algebra"));
        const akx::AlgebraElement zs(d, akx::coords_from_json(cfg.at("z_soul"), "z_soul"));
        const akx::AlgebraElement ws(d, akx::coords_from_json(cfg.at("w_soul"), "w_soul"));
        const cplx zb = akx::cplx_from_json(cfg.at("z_body"), "z_body");
        const cplx wb = akx::cplx_from_json(cfg.at("w_body"), "w_body");
        out["value"] = akx::element_to_json(akx::grassmann_closed_form(k, zb, zs, wb, ws));
        out["exact"] = true;  // terminates by nilpotence
        if (cfg.contains("a") && cfg.contains("b")) {
            const akx::DualFunctional a(d, akx::coords_from_json(cfg.at("a"), "a"));
            const akx::DualFunctional b(d, akx::coords_from_json(cfg.at("b"), "b"));
            out["paired"] = akx::cplx_to_json(
                akx::grassmann_closed_form_paired(k, a, zb, zs, b, wb, ws));
        }
        return 0;
    }

    throw std::invalid_argument("unknown kernel op: " + op);
}

// Builds the Gram matrix named by cfg["kernel"] over a seeded tuple plan.
akx::Mat build_gram(const nlohmann::json& cfg, long long seed_override, ojson& out) {
    akx::require_keys(cfg, "config",
                      {"command", "kernel", "algebra", "count", "truncation"},
                      {"seed", "N", "tolerance", "level", "base_kernel"});
    const auto d = akx::descriptor_from_json(cfg.at("algebra"));
    const auto pol = policy_from_json(cfg.at("truncation"));
    const std::uint64_t seed = seed_override >= 0
                                   ? static_cast<std::uint64_t>(seed_override)
                                   : (cfg.contains("seed") ? cfg.at("seed").get<std::uint64_t>() : 1);
    const int count = cfg.at("count").get<int>();
    const double level = cfg.contains("level") ? cfg.at("level").get<double>() : 0.0;
    const auto which = cfg.at("kernel").get<std::string>();
    const auto plan = akx::make_tuple_plan(d, seed, count);

    out["kernel"] = which;
    out["seed"] = seed;
    out["count"] = count;

    if (which == "fock_extended") {
        return akx::gram(
            [&](int i, int j) {
                return akx::fock_extended(plan.tuples[static_cast<size_t>(i)],
                                          plan.tuples[static_cast<size_t>(j)], pol, level)
                    .value;
            },
            count);
    }
    if (which == "quaternion") {
        if (d.kind != akx::AlgebraKind::quaternion)
            throw std::invalid_argument("quaternion gram requires the quaternion algebra");
        return akx::gram(
            [&](int i, int j) {
                const auto& ti = plan.tuples[static_cast<size_t>(i)];
                const auto& tj = plan.tuples[static_cast<size_t>(j)];
                return cplx{akx::quaternion_kernel(ti.a, ti.arg, ti.z.real(), tj.a, tj.arg,
                                                   tj.z.real(), pol)
                                .value};
            },
            count);
    }
    if (which == "extended") {
        const int order = cfg.contains("N") ? cfg.at("N").get<int>() : pol.order;
        const auto k = cfg.contains("base_kernel") ? akx::kernel_from_json(cfg.at("base_kernel"))
                                                   : akx::kernel_preset("fock");
        std::vector<akx::XSeries> xs;
        for (int i = 0; i < count; ++i) {
            const auto& t = plan.tuples[static_cast<size_t>(i)];
            const auto rep = akx::ell2_check(t.a, t.arg, level);
            if (!rep.summable)
                throw akx::method_error("l2 certification failed for tuple " + std::to_string(i));
            xs.push_back(akx::power_x_series(t.z, t.arg, t.a, order, level));
        }
        return akx::gram(
            [&](int i, int j) {
                return akx::extended_kernel(k, xs[static_cast<size_t>(i)],
                                            xs[static_cast<size_t>(j)], order)
                    .value;
            },
            count);
    }
    throw std::invalid_argument("unknown gram kernel: " + which);
}

int run_gram(const nlohmann::json& cfg, long long seed_override, const Options& opt, ojson& out,
             std::string& csv_payload) {
    out["command"] = "gram";
    const akx::Mat g = build_gram(cfg, seed_override, out);
    out["size"] = g.rows;
    out["hermitian_defect"] = akx::hermitian_defect(g);
    if (opt.format == "csv") {
        std::ostringstream os;
        akx::mat_to_csv(g, os);
        csv_payload = os.str();
    } else {
        out["gram"] = akx::mat_to_json(g);
    }
    return 0;
}

int run_check(const nlohmann::json& cfg, long long seed_override, ojson& out) {
    out["command"] = "check";
    const akx::Mat g = build_gram(cfg, seed_override, out);
    const double tol = cfg.contains("tolerance") ? cfg.at("tolerance").get<double>() : 1e-9;
    const auto rep = akx::psd_report(g, tol);
    out["report"] = akx::psd_report_to_json(rep);
    return rep.pass ? 0 : 2;
}

int run_opcheck(const nlohmann::json& cfg, ojson& out) {
    akx::require_keys(cfg, "config", {"command", "op", "N"}, {"M", "z", "function"});
    const auto op = cfg.at("op").get<std::string>();
    const int n = cfg.at("N").get<int>();
    const cplx z = cfg.contains("z") ? akx::cplx_from_json(cfg.at("z"), "z") : cplx{0.3, 0.0};
    const auto f = cfg.contains("function") ? akx::function_from_json(cfg.at("function"))
                                            : akx::function_preset("exp");
    out["command"] = "opcheck";
    out["op"] = op;
    out["N"] = n;

    if (op == "Z" || op == "S") {
        const auto rep = akx::commutator_check(n);
        out["commutator_leading_deviation"] = rep.leading_deviation;
        out["commutator_edge"] = rep.bottom_right;
        if (op == "S") {
            // S realizes differentiation on clean entries
            const auto jf = akx::jet_of(f, z, n);
            const auto sjf = akx::apply(akx::JetOperator::derivative_s(n), jf);
            const auto jdf =
                akx::extend_operator(akx::CoefficientOperator::differentiation(f.degree() + 1), f, z, n);
            double dev = 0.0;
            for (int i = 0; i < sjf.clean_entries(); ++i)
                dev = std::max(dev, std::abs(sjf.entries[static_cast<size_t>(i)] -
                                             jdf.entries[static_cast<size_t>(i)]));
            out["derivative_deviation"] = dev;
        }
        return 0;
    }
    if (op == "Mz") {
        const auto jf = akx::jet_of(f, z, n);
        const auto via_jet = akx::apply(akx::JetOperator::mult_by_zeta(n, z), jf);
        const auto via_coeff =
            akx::extend_operator(akx::CoefficientOperator::mult_by_zeta(f.degree() + 2), f, z, n);
        double dev = 0.0;
        for (int i = 0; i < via_jet.clean_entries(); ++i)
            dev = std::max(dev, std::abs(via_jet.entries[static_cast<size_t>(i)] -
                                         via_coeff.entries[static_cast<size_t>(i)]));
        out["extension_deviation"] = dev;
        return 0;
    }
    if (op == "dz") {
        const auto jf = akx::jet_of(f, z, n);
        const auto via_jet = akx::apply(akx::JetOperator::derivative_s(n), jf);
        const auto via_coeff =
            akx::extend_operator(akx::CoefficientOperator::differentiation(f.degree() + 1), f, z, n);
        double dev = 0.0;
        for (int i = 0; i < via_jet.clean_entries(); ++i)
            dev = std::max(dev, std::abs(via_jet.entries[static_cast<size_t>(i)] -
                                         via_coeff.entries[static_cast<size_t>(i)]));
        out["extension_deviation"] = dev;
        return 0;
    }
    if (op == "DM") {
        const double m_scale = cfg.contains("M") ? cfg.at("M").get<double>() : 0.5;
        const auto jf = akx::jet_of(f, z, n);
        const auto scaled = akx::apply(akx::JetOperator::diagonal_m(n, m_scale), jf);
        double dev = 0.0;
        double pw = 1.0;
        for (int i = 0; i < n; ++i) {
            dev = std::max(dev, std::abs(scaled.entries[static_cast<size_t>(i)] -
                                         pw * jf.entries[static_cast<size_t>(i)]));
            pw *= m_scale;
        }
        out["M"] = m_scale;
        out["scaling_deviation"] = dev;
        return 0;
    }
    throw std::invalid_argument("unknown opcheck op: " + op);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"analytic function calculus on topological algebras"};
    Options opt;
    app.add_option("--config", opt.config_path, "path to the JSON run config")->required();
    app.add_option("--out", opt.out_path, "output path (stdout when omitted)");
    app.add_option("--format", opt.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--seed", opt.seed_override, "override the config seed");
    app.add_flag("--quiet", opt.quiet, "suppress the summary line");
    CLI11_PARSE(app, argc, argv);

    ojson out;
    std::string csv_payload;
    int code = 0;
    try {
        std::ifstream in(opt.config_path);
        if (!in) {
            std::cerr << "error: cannot open config " << opt.config_path << "\n";
            return 1;
        }
        const auto cfg = nlohmann::json::parse(in);
        if (!cfg.is_object() || !cfg.contains("command"))
            throw std::invalid_argument("config must be an object with a 'command'");
        const auto command = cfg.at("command").get<std::string>();

        if (opt.format == "csv" && command != "gram")
            throw std::invalid_argument("csv output is supported for the gram command only");

        if (command == "eval")
            code = run_eval(cfg, out);
        else if (command == "jet")
            code = run_jet(cfg, out);
        else if (command == "kernel")
            code = run_kernel(cfg, out);
        else if (command == "gram")
            code = run_gram(cfg, opt.seed_override, opt, out, csv_payload);
        else if (command == "check")
            code = run_check(cfg, opt.seed_override, out);
        else if (command == "opcheck")
            code = run_opcheck(cfg, out);
        else
            throw std::invalid_argument("unknown command: " + command);
    } catch (const akx::method_error& e) {
        out["error"] = e.what();
        code = 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::out_of_range& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }

    const std::string payload = opt.format == "csv" ? csv_payload : out.dump(2) + "\n";
    if (opt.out_path.empty()) {
        std::cout << payload;
    } else {
        std::ofstream os(opt.out_path, std::ios::binary);
        if (!os) {
            std::cerr << "error: cannot open output " << opt.out_path << "\n";
            return 1;
        }
        os << payload;
    }
    if (!opt.quiet) std::cerr << "akx: exit " << code << "\n";
    return code;
}
