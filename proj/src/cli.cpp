#include "invpde/cli.hpp"

#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "invpde/conformal.hpp"
#include "invpde/euclidean.hpp"
#include "invpde/harness.hpp"
#include "invpde/invariant_poly.hpp"
#include "invpde/jet.hpp"
#include "json.hpp"

namespace invpde {

namespace {

InvariantPoly::Family family_of(const std::string& group) {
    if (group == "euclidean") return InvariantPoly::Family::Euclidean;
    if (group == "conformal") return InvariantPoly::Family::Conformal;
    throw CLI::ValidationError("--group must be euclidean or conformal");
}

EmitFormat format_of(const std::string& fmt) {
    if (fmt == "text") return EmitFormat::Text;
    if (fmt == "latex") return EmitFormat::Latex;
    if (fmt == "json") return EmitFormat::Json;
    throw CLI::ValidationError("--format must be text, latex or json");
}

int cmd_generate(const std::string& group, int n, const std::string& poly_spec,
                 const std::string& fmt, std::ostream& out) {
    InvariantPoly::Family family = family_of(group);
    InvariantPoly F = parse_poly(poly_spec, family);
    GeneratedPde pde = family == InvariantPoly::Family::Euclidean
                           ? generate_euclidean_pde(F, n)
                           : generate_conformal_pde(F, n);
    EmitFormat format = format_of(fmt);
    if (format == EmitFormat::Json) {
        nlohmann::json j;
        j["group"] = group;
        j["n"] = n;
        j["poly"] = poly_spec;
        j["numerator"] = nlohmann::json::parse(emit(pde.numerator, EmitFormat::Json));
        j["cleared"] = nlohmann::json::parse(emit(pde.cleared, EmitFormat::Json));
        out << j.dump() << "\n";
    } else {
        out << emit(pde.numerator, format) << " = 0\n";
        out << "cleared factor: " << emit(pde.cleared, format) << "\n";
    }
    return 0;
}

int cmd_invariants(const std::string& group, int n, const std::string& jet_path,
                   const std::string& fmt, std::ostream& out) {
    std::ifstream in(jet_path);
    if (!in) throw Error("cannot open jet file: " + jet_path);
    std::stringstream buf;
    buf << in.rdbuf();
    JetPoint2 p = jet_from_json(buf.str());
    if (p.n != n) throw Error("jet dimension does not match -n");

    InvariantPoly::Family family = family_of(group);
    std::vector<Expr> invariants =
        family == InvariantPoly::Family::Euclidean ? power_traces(n) : conformal_traces(n);
    const int first = family == InvariantPoly::Family::Euclidean ? 1 : 2;
    const char* prefix = family == InvariantPoly::Family::Euclidean ? "tau_" : "tauo_";

    std::vector<double> values;
    for (const Expr& e : invariants) values.push_back(eval_numeric(e, p));

    if (format_of(fmt) == EmitFormat::Json) {
        nlohmann::json j;
        j["group"] = group;
        j["n"] = n;
        nlohmann::json vals = nlohmann::json::object();
        for (std::size_t k = 0; k < values.size(); ++k)
            vals[prefix + std::to_string(first + static_cast<int>(k))] = values[k];
        j["invariants"] = vals;
        out << j.dump() << "\n";
    } else {
        for (std::size_t k = 0; k < values.size(); ++k)
            out << prefix << first + static_cast<int>(k) << " = " << values[k] << "\n";
    }
    return 0;
}

int cmd_verify(const std::string& suite, int n, long trials, double tol, std::uint64_t seed,
               int threads, std::ostream& out) {
    SuiteGroup group;
    if (suite == "euclidean")
        group = SuiteGroup::Euclidean;
    else if (suite == "conformal")
        group = SuiteGroup::Conformal;
    else
        throw CLI::ValidationError("--suite must be euclidean or conformal");
    TrialReport r = run_invariance_suite(group, n, trials, tol, seed, threads);
    out << report_to_json(r) << "\n";
    return r.failures > 0 ? 1 : 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Invariant PDE engine for Euclidean and Moebius hypersurface geometry"};
    app.require_subcommand(1);

    std::string group = "euclidean", poly_spec, fmt = "text";
    int n = 2;
    auto* gen = app.add_subcommand("generate", "Generate an invariant PDE from a polynomial "
                                               "in the invariants");
    gen->add_option("--group", group, "euclidean or conformal")
        ->required()
        ->check(CLI::IsMember({"euclidean", "conformal"}));
    gen->add_option("-n,--dim", n, "number of independent variables")->required();
    gen->add_option("--poly", poly_spec,
                    "polynomial spec, e.g. \"1/2*t1^2 - 1/2*t2\" (euclidean) or \"c2\" "
                    "(conformal)")
        ->required();
    gen->add_option("--format", fmt, "text, latex or json");

    std::string jet_path;
    auto* inv = app.add_subcommand("invariants", "Evaluate the invariants on a JSON jet");
    inv->add_option("--group", group, "euclidean or conformal")
        ->required()
        ->check(CLI::IsMember({"euclidean", "conformal"}));
    inv->add_option("-n,--dim", n, "number of independent variables")->required();
    inv->add_option("--jet", jet_path, "path to a jet JSON file")->required();
    inv->add_option("--format", fmt, "text or json");

    std::string suite = "euclidean";
    long trials = 1000;
    double tol = 1e-9;
    std::uint64_t seed = 0;
    int threads = 0;
    auto* ver = app.add_subcommand("verify", "Run a randomized invariance suite");
    ver->add_option("--suite", suite, "euclidean or conformal")
        ->required()
        ->check(CLI::IsMember({"euclidean", "conformal"}));
    ver->add_option("-n,--dim", n, "number of independent variables")->required();
    ver->add_option("--trials", trials, "number of random trials");
    ver->add_option("--tol", tol, "relative tolerance");
    ver->add_option("--seed", seed, "base RNG seed");
    ver->add_option("--threads", threads, "worker threads (0 = INVPDE_THREADS or 1)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        if (gen->parsed()) return cmd_generate(group, n, poly_spec, fmt, out);
        if (inv->parsed()) return cmd_invariants(group, n, jet_path, fmt, out);
        if (ver->parsed()) return cmd_verify(suite, n, trials, tol, seed, threads, out);
    } catch (const ParseError& e) {
        err << "parse error at position " << e.position << ": " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    err << app.help();
    return 2;
}

}  // namespace invpde
