// kida: tau values, local h-values, lambda transitions and property suites.
//
// Exit codes: 0 ok, 1 verify found a counterexample, 2 precision exceeded /
// mu nonzero / missing local type for hv, 3 bad field or field containment,
// 4 missing local data in a transition, 5 any other input error.

#include <cstdlib>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kida/kida.hpp"
#include "kida/report.hpp"
#include "kida/verify.hpp"

namespace {

using namespace kida;
using report::json;

struct Exit {
    int code;
    std::string message;
};

splitting::AbelianField field_arg(const std::string& spec) {
    try {
        return splitting::parse_field(spec);
    } catch (const Error& e) {
        throw Exit{3, e.what()};
    }
}

int exit_code(const Error& e, const std::string& command) {
    switch (e.code()) {
    case ErrorCode::PrecisionExceeded:
    case ErrorCode::MuNonzero: return 2;
    case ErrorCode::MissingLocalType: return command == "transition" ? 4 : 2;
    case ErrorCode::NotASubfield:
    case ErrorCode::NotPPower:
    case ErrorCode::AmbiguousSubgroup: return 3;
    default: return 5;
    }
}

/// `--local ell=<typespec>` entries.
LocalTypeMap local_types(const std::vector<std::string>& specs, u64 p) {
    LocalTypeMap out;
    for (const auto& s : specs) {
        auto eq = s.find('=');
        require(eq != std::string::npos, ErrorCode::ParseError, "expected ell=<type> in '" + s + "'");
        u64 ell = parse_u64(s.substr(0, eq));
        require(is_prime(ell), ErrorCode::ParseError, std::to_string(ell) + " is not prime");
        require(out.emplace(ell, localfactor::parse_local_type(s.substr(eq + 1), p)).second, ErrorCode::ParseError,
                "two local types for " + std::to_string(ell));
    }
    return out;
}

bool is_local_type_spec(const std::string& s) {
    return s == "sc" || s.starts_with("ups:") || s.starts_with("ramps:") || s.starts_with("special:") ||
           s.starts_with("generic:");
}

/// Appends `--key=value` for every config entry whose flag is not already on
/// the command line, so flags override the file.
std::vector<std::string> with_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].starts_with("--config=")) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    std::set<std::string> given;
    for (const auto& a : args)
        if (a.starts_with("--")) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigTOML().from_file(path);
    } catch (const CLI::Error& e) {
        throw Exit{5, std::string("config: ") + e.what()};
    }
    for (const auto& item : items) {
        if (item.name == "++" || item.name == "--" || given.count(item.name)) continue;
        require(item.parents.empty(), ErrorCode::ParseError, "config sections are not supported: " + item.name);
        for (const auto& v : item.inputs) args.push_back("--" + item.name + "=" + v);
    }
    return args;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kida-type transition formulas for lambda and mu invariants of modular forms"};
    app.require_subcommand(1);
    bool as_json = false;
    std::string config_path;
    app.add_flag("--json", as_json, "strict JSON output");
    app.add_option("--config", config_path, "file of `key = value` lines; flags override it");

    std::size_t precision = qexp::kDefaultPrecision;
    auto add_precision = [&](CLI::App* sub) {
        sub->add_option("--precision", precision, "series precision budget")->envname("KIDA_PRECISION");
    };

    // tau
    auto* tau_cmd = app.add_subcommand("tau", "Ramanujan tau(n) from the eta product");
    u64 tau_n = 0;
    std::optional<u64> tau_mod;
    tau_cmd->add_option("--n", tau_n, "index")->required();
    tau_cmd->add_option("--mod", tau_mod, "reduce modulo m");
    add_precision(tau_cmd);

    // hv
    auto* hv_cmd = app.add_subcommand("hv", "h_v of a form or local type at one prime");
    std::string hv_form, hv_ext, hv_base = "Q";
    u64 hv_p = 0, hv_ell = 0, hv_e = 0;
    std::vector<std::string> hv_local;
    hv_cmd->add_option("--form", hv_form, "delta | ec:... | table:<path> | a local type")->required();
    hv_cmd->add_option("--p", hv_p, "the prime p");
    hv_cmd->add_option("--ell", hv_ell, "the prime ell != p");
    auto* e_opt = hv_cmd->add_option("--e", hv_e, "ramification index");
    auto* ext_opt = hv_cmd->add_option("--ext", hv_ext, "extension field spec");
    e_opt->excludes(ext_opt);
    hv_cmd->add_option("--base", hv_base, "base field spec");
    hv_cmd->add_option("--local", hv_local, "ell=<type> for primes dividing the level");
    add_precision(hv_cmd);

    // transition
    auto* tr_cmd = app.add_subcommand("transition", "lambda over F'_inf from lambda over F_inf");
    std::string tr_form, tr_base = "Q", tr_ext, tr_kind = "algebraic";
    u64 tr_p = 0, tr_lambda = 0, tr_mu = 0;
    std::vector<std::string> tr_local;
    bool tr_assert = false, tr_twists = false;
    std::optional<bool> tr_mc;
    tr_cmd->add_option("--form", tr_form, "delta | ec:... | table:<path>; omit to use --local only");
    tr_cmd->add_option("--p", tr_p, "the odd prime p")->required();
    tr_cmd->add_option("--base", tr_base, "base field F");
    tr_cmd->add_option("--ext", tr_ext, "extension field F'")->required();
    tr_cmd->add_option("--lambda", tr_lambda, "lambda over F_inf")->required();
    tr_cmd->add_option("--mu", tr_mu, "mu over F_inf")->required();
    tr_cmd->add_option("--kind", tr_kind, "algebraic | analytic | plus | minus");
    tr_cmd->add_option("--local", tr_local, "ell=<type>, repeatable");
    tr_cmd->add_flag("--assert-hypotheses", tr_assert, "assert the hypotheses the formula needs");
    tr_cmd->add_flag("--twists", tr_twists, "also list lambda of each twist");
    tr_cmd->add_option("--mc", tr_mc, "main conjecture over F (true|false): report its transfer");
    add_precision(tr_cmd);

    // verify
    auto* v_cmd = app.add_subcommand("verify", "property suites");
    std::string v_suite;
    u64 v_seed = 0;
    std::optional<u64> v_size;
    v_cmd->add_option("--suite", v_suite, "group-identity | tower-additivity | path-agreement | hasse")
        ->required()
        ->check(CLI::IsMember({"group-identity", "tower-additivity", "path-agreement", "hasse"}));
    v_cmd->add_option("--seed", v_seed, "random seed");
    v_cmd->add_option("--size", v_size, "size bound");

    for (auto* sub : {tau_cmd, hv_cmd, tr_cmd, v_cmd}) sub->fallthrough();

    std::string command;
    try {
        std::vector<std::string> args(argv, argv + argc);
        args = with_config(std::move(args));
        std::vector<const char*> cargs;
        for (const auto& a : args) cargs.push_back(a.c_str());
        try {
            app.parse(int(cargs.size()), const_cast<char**>(cargs.data()));
        } catch (const CLI::ParseError& e) {
            int code = app.exit(e);
            return code == 0 ? 0 : 5;
        }

        if (*tau_cmd) {
            command = "tau";
            Int t = qexp::tau(tau_n, precision);
            if (tau_mod) {
                require(*tau_mod >= 1, ErrorCode::InvalidArgument, "--mod must be positive");
                t = Int(reduce(t, *tau_mod));
            }
            if (as_json) {
                json j{{"n", tau_n}, {"tau", report::integer(t)}};
                if (tau_mod) j["mod"] = *tau_mod;
                std::cout << report::render_json(j);
            } else {
                std::cout << to_string(t) << "\n";
            }
            return 0;
        }

        if (*hv_cmd) {
            command = "hv";
            json j;
            localfactor::LocalType type;
            u64 e = hv_e;
            if (!hv_ext.empty()) {
                require(hv_ell != 0, ErrorCode::InvalidArgument, "--ext needs --ell");
                auto base = field_arg(hv_base), ext = field_arg(hv_ext);
                if (!splitting::is_subfield(base, ext)) throw Exit{3, "base is not contained in the extension"};
                u64 eb = splitting::efg(base, hv_ell).e, ex = splitting::efg(ext, hv_ell).e;
                e = ex / eb;
                j["base"] = base.describe();
                j["extension"] = ext.describe();
            }
            require(e >= 1, ErrorCode::InvalidArgument, "give --e or --ext");
            if (is_local_type_spec(hv_form)) {
                type = localfactor::parse_local_type(hv_form, hv_p);
                j["type_source"] = "user";
            } else {
                require(hv_p != 0 && hv_ell != 0, ErrorCode::InvalidArgument, "a form needs --p and --ell");
                auto f = qexp::parse_form(hv_form, precision);
                auto base = field_arg(hv_base);
                auto [t, source] =
                    resolve_local_type(&f, local_types(hv_local, hv_p), hv_ell, hv_p, splitting::efg(base, hv_ell));
                type = t;
                j["form"] = f.id();
                j["type_source"] = source;
                if (f.level() % hv_ell != 0) j["a_ell"] = report::integer(f.prime_coefficient(hv_ell));
            }
            if (hv_p) j["p"] = hv_p;
            if (hv_ell) j["ell"] = hv_ell;
            j["e"] = e;
            j["local_type"] = localfactor::to_string(type);
            j["case"] = localfactor::h_case(type);
            if (auto* u = std::get_if<localfactor::UnramifiedPS>(&type)) {
                j["a_mod_p"] = u->a;
                j["c_mod_p"] = u->c;
            }
            j["h"] = report::integer(localfactor::h_v(type, e));
            j["m"] = report::integer(localfactor::m_extension(type, e));
            std::cout << report::render(j, as_json);
            return 0;
        }

        if (*tr_cmd) {
            command = "transition";
            auto kind = parse_kind(tr_kind);
            auto F = field_arg(tr_base), Fp = field_arg(tr_ext);
            std::optional<qexp::ModularForm> f;
            if (!tr_form.empty()) f = qexp::parse_form(tr_form, precision);
            auto local = local_types(tr_local, tr_p);
            auto hyp = tr_assert ? Hypotheses::all_asserted(kind) : Hypotheses::unasserted(kind);
            auto base = InvariantRecord::asserted(kind, tr_mu, tr_lambda);
            auto r = transition(f ? &*f : nullptr, local, tr_p, F, Fp, base, hyp);
            json j = report::to_json(r);
            if (tr_twists) {
                auto tl = twist_lambdas(r);
                j["twists"] = tl;
                std::vector<TwistInvariant> per;
                for (u64 v : tl) per.push_back({0, v});
                j["twists_sum"] = lambda_via_twists(per, r.degree);
            }
            if (tr_mc) {
                auto other_kind = kind == InvariantKind::Analytic ? InvariantKind::Algebraic : InvariantKind::Analytic;
                require(kind == InvariantKind::Algebraic || kind == InvariantKind::Analytic, ErrorCode::InvalidArgument,
                        "--mc needs an algebraic or analytic kind");
                auto other = transition(f ? &*f : nullptr, local, tr_p, F, Fp,
                                        InvariantRecord::asserted(other_kind, tr_mu, tr_lambda),
                                        tr_assert ? Hypotheses::all_asserted(other_kind)
                                                  : Hypotheses::unasserted(other_kind));
                auto t = kind == InvariantKind::Algebraic ? mc_transfer(*tr_mc, r, other) : mc_transfer(*tr_mc, other, r);
                j["main_conjecture"] = report::to_json(t);
            }
            std::cout << report::render(j, as_json);
            return 0;
        }

        if (*v_cmd) {
            command = "verify";
            verify::VerifyResult r;
            if (v_suite == "group-identity") r = verify::group_identity_suite(v_seed, v_size.value_or(200));
            else if (v_suite == "tower-additivity") r = verify::tower_additivity_suite(v_seed, v_size.value_or(27));
            else if (v_suite == "path-agreement") r = verify::path_agreement_suite(v_seed);
            else r = verify::hasse_suite(v_seed, v_size.value_or(100));
            json j{{"suite", r.suite}, {"seed", r.seed},          {"size", r.size},
                   {"cases", r.cases}, {"passed", r.passed()}, {"counterexamples", r.counterexamples}};
            std::cout << report::render(j, as_json);
            return r.passed() ? 0 : 1;
        }
    } catch (const Exit& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e, command);
    }
    return 5;
}
