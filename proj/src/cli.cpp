#include "ordchain/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "ordchain/borel_code.hpp"
#include "ordchain/errors.hpp"
#include "ordchain/sieve.hpp"
#include "ordchain/uniform_sets.hpp"
#include "ordchain/verify.hpp"

namespace ordchain {

namespace {

std::uint64_t seed_from_env() {
    const char* env = std::getenv("CHAINS_SEED");
    if (!env) return 0;
    return std::strtoull(env, nullptr, 10);
}

void write_output(const std::string& text, const std::string& out_path, std::ostream& out) {
    if (out_path.empty()) {
        out << text << "\n";
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw Error("cannot open output file " + out_path);
    f << text;
}

ChainStrategy strategy_from(const std::string& s) {
    if (s == "direct") return ChainStrategy::Direct;
    if (s == "interleaved") return ChainStrategy::Interleaved;
    throw ParseError("strategy must be direct or interleaved, got " + s);
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open input file " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

nlohmann::json parse_json(const std::string& bytes) {
    try {
        return nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.what(), e.byte);
    }
}

ProbePlan load_plan(const Ordinal& mu, const std::string& probes_arg, std::uint64_t seed) {
    ProbePlan plan = default_probe_plan(mu, seed);
    if (probes_arg.empty() || probes_arg == "default") return plan;
    // a file of set expressions, one per line, appended to the default plan
    std::ifstream f(probes_arg);
    if (!f) throw Error("cannot open probes file " + probes_arg);
    std::string line;
    while (std::getline(f, line)) {
        std::string trimmed;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c)) || !trimmed.empty()) trimmed += c;
        while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
            trimmed.pop_back();
        if (trimmed.empty() || trimmed[0] == '#') continue;
        SymbolicReal z = SymbolicReal::parse(trimmed);
        plan.reals.push_back(z);
        std::vector<Rat> w = {Rat(0), Rat(1, 2), Rat(2)};
        auto rep = z.initial_segment();
        for (std::uint64_t k = 0; k < 3; ++k) {
            auto e = rep.element_at(Ordinal::from_int(k));
            if (e) w.push_back(*e);
        }
        plan.windows.push_back(std::move(w));
    }
    return plan;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"chains: build, evaluate and certify well-ordered systems of uniform sets"};
    app.require_subcommand(1);

    std::string length_text, strategy_text = "direct", out_path, probes_arg = "default";
    std::string set_kind = "U", xi_text = "0", real_text, r_text, in_path, what, mu_text;
    std::string lo_text = "0", hi_text = "1", kind_hint;
    std::uint64_t seed = seed_from_env();
    std::uint64_t digits = 32;
    bool as_json = false;

    auto* build = app.add_subcommand("build-chain", "construct a chain of the given length");
    build->add_option("--length", length_text, "ordinal length, e.g. w*2")->required();
    build->add_option("--strategy", strategy_text, "direct | interleaved");
    build->add_option("--out", out_path, "write the chain document here");
    build->add_option("--seed", seed, "determinism seed");
    build->add_flag("--json", as_json, "machine-readable output");

    auto* eval = app.add_subcommand("eval", "evaluate a set at a symbolic real");
    eval->add_option("--set", set_kind, "U | D | E | G");
    eval->add_option("--xi", xi_text, "ordinal level");
    eval->add_option("--real", real_text, "set expression, e.g. wo(w+1,(0,1))")->required();
    eval->add_option("--r", r_text, "ordinate to test (multicode evaluation)");
    eval->add_flag("--json", as_json);

    auto* verify = app.add_subcommand("verify", "certify a chain document");
    verify->add_option("--chain", in_path, "chain document path")->required();
    verify->add_option("--probes", probes_arg, "default, or a file of extra set expressions");
    verify->add_option("--seed", seed);
    verify->add_option("--out", out_path);
    verify->add_flag("--json", as_json);

    auto* decompose = app.add_subcommand("decompose", "layer decomposition of a chain");
    decompose->add_option("--chain", in_path)->required();
    decompose->add_option("--probes", probes_arg);
    decompose->add_option("--seed", seed);
    decompose->add_option("--out", out_path);
    decompose->add_flag("--json", as_json);

    auto* exp = app.add_subcommand("export", "serialize a constructed object");
    exp->add_option("--what", what, "u-multicode | g-multicode | u-code | d-code | e-code")
        ->required();
    exp->add_option("--xi", xi_text);
    exp->add_option("--r", r_text, "section ordinate for u-code");
    exp->add_option("--out", out_path);

    auto* imp = app.add_subcommand("import", "parse and validate a serialized object");
    imp->add_option("--in", in_path)->required();
    imp->add_option("--kind", kind_hint, "chain | code | multicode");
    imp->add_flag("--json", as_json);

    auto* enc = app.add_subcommand("encode-real", "binary expansion of a set's encoding");
    enc->add_option("--real", real_text)->required();
    enc->add_option("--digits", digits, "digits to print for inexact encodings");
    enc->add_flag("--json", as_json);

    auto* wo = app.add_subcommand("wo-set", "canonical well-ordered witness");
    wo->add_option("--mu", mu_text, "order type")->required();
    wo->add_option("--lo", lo_text);
    wo->add_option("--hi", hi_text);
    wo->add_option("--out", out_path);
    wo->add_flag("--json", as_json);

    std::vector<std::string> argv = args;
    try {
        std::vector<const char*> cargv;
        cargv.push_back("chains");
        for (const auto& a : argv) cargv.push_back(a.c_str());
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }

    try {
        if (build->parsed()) {
            Chain c = build_chain(Ordinal::parse(length_text), strategy_from(strategy_text));
            write_output(c.to_json().dump(), out_path, out);
            return 0;
        }
        if (eval->parsed()) {
            SymbolicReal z = SymbolicReal::parse(real_text);
            Ordinal xi = Ordinal::parse(xi_text);
            if (set_kind == "U") {
                UniformSet u = build_u(xi);
                if (!r_text.empty()) {
                    bool member = eval_multicode(u.multicode(), z, Rat::from_string(r_text));
                    out << (as_json ? nlohmann::json{{"member", member}}.dump()
                                    : std::string(member ? "true" : "false"))
                        << "\n";
                    return 0;
                }
                auto v = u.value_at(z);
                if (as_json)
                    out << nlohmann::json{{"value", v ? nlohmann::json(v->to_string())
                                                      : nlohmann::json(nullptr)}}
                               .dump()
                        << "\n";
                else
                    out << (v ? v->to_string() : "absent") << "\n";
                return 0;
            }
            if (set_kind == "D" || set_kind == "E") {
                BorelCode code = set_kind == "D" ? build_d(xi) : derived_e(xi);
                bool member = eval_code(code, z);
                out << (as_json ? nlohmann::json{{"member", member}}.dump()
                                : std::string(member ? "true" : "false"))
                    << "\n";
                return 0;
            }
            if (set_kind == "G") {
                if (r_text.empty()) throw ParseError("eval --set G needs --r");
                bool member = decode_sieve(z, Rat::from_string(r_text));
                out << (as_json ? nlohmann::json{{"member", member}}.dump()
                                : std::string(member ? "true" : "false"))
                    << "\n";
                return 0;
            }
            throw ParseError("unknown --set " + set_kind + " (use U, D, E or G)");
        }
        if (verify->parsed()) {
            Chain c = Chain::from_json(parse_json(slurp(in_path)));
            ProbePlan plan = load_plan(c.length(), probes_arg, seed);
            VerificationReport rep = verify_chain(c, plan);
            if (as_json || !out_path.empty()) {
                write_output(rep.to_json().dump(), out_path, out);
            } else {
                out << (rep.all_pass() ? "PASS" : "FAIL") << " uniformity="
                    << (rep.uniformity_ok ? "ok" : "fail") << " ordering="
                    << (rep.ordering_ok ? "ok" : "fail") << " projection="
                    << (rep.projection_ok ? "ok" : "fail") << " oracle="
                    << rep.oracle_checks - rep.oracle_disagreements << "/" << rep.oracle_checks
                    << " audit=" << (rep.length_audit_ok ? "ok" : "fail") << "\n";
            }
            return rep.all_pass() ? 0 : 1;
        }
        if (decompose->parsed()) {
            Chain c = Chain::from_json(parse_json(slurp(in_path)));
            ProbePlan plan = load_plan(c.length(), probes_arg, seed);
            LayerDecomposition d = decompose_layers(c, plan);
            write_output(d.to_json().dump(), out_path, out);
            return 0;
        }
        if (exp->parsed()) {
            Ordinal xi = Ordinal::parse(xi_text);
            std::string bytes;
            if (what == "u-multicode")
                bytes = serialize(BorelMultiCode::u(xi));
            else if (what == "g-multicode")
                bytes = serialize(BorelMultiCode::g());
            else if (what == "u-code")
                bytes = serialize(u_section_code(
                    xi, r_text.empty() ? Rat(0) : Rat::from_string(r_text)));
            else if (what == "d-code")
                bytes = serialize(build_d(xi));
            else if (what == "e-code")
                bytes = serialize(derived_e(xi));
            else
                throw ParseError("unknown --what " + what);
            write_output(bytes, out_path, out);
            return 0;
        }
        if (imp->parsed()) {
            std::string bytes = slurp(in_path);
            nlohmann::json j = parse_json(bytes);
            std::string kind = kind_hint;
            if (kind.empty()) {
                if (j.contains("length")) kind = "chain";
                else if (j.contains("mc")) kind = "multicode";
                else kind = "code";
            }
            nlohmann::json summary;
            if (kind == "chain") {
                Chain c = Chain::from_json(j);
                summary = {{"kind", "chain"},
                           {"length", c.length().to_string()},
                           {"strategy",
                            c.strategy() == ChainStrategy::Direct ? "direct" : "interleaved"}};
            } else if (kind == "multicode") {
                BorelMultiCode mc = deserialize_multicode(bytes);
                summary = {{"kind", "multicode"}, {"bytes", serialize(mc).size()}};
            } else {
                BorelCode code = deserialize_code(bytes);
                summary = {{"kind", "code"}, {"rank", rank(code).to_string()}};
            }
            out << (as_json ? summary.dump() : "ok: " + summary.dump()) << "\n";
            return 0;
        }
        if (enc->parsed()) {
            SymbolicReal z = SymbolicReal::parse(real_text);
            BinaryExpansion x = encode_real(z);
            if (x.is_exact()) {
                out << (as_json ? nlohmann::json{{"exact", x.exact_value().to_string()}}.dump()
                                : x.exact_value().to_string())
                    << "\n";
            } else {
                std::string ds;
                for (std::uint64_t p = 1; p <= digits; ++p) ds += char('0' + x.digit(p));
                out << (as_json ? nlohmann::json{{"digits", ds}}.dump() : "0." + ds + "...")
                    << "\n";
            }
            return 0;
        }
        if (wo->parsed()) {
            SymbolicReal z = canonical_wo_set(Ordinal::parse(mu_text), Rat::from_string(lo_text),
                                              Rat::from_string(hi_text));
            write_output(z.to_json().dump(), out_path, out);
            return 0;
        }
        err << "no subcommand\n";
        return 2;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace ordchain
