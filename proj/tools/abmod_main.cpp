// Command line front end: module files in, invariant reports and module
// files out. Exit codes: 0 success, 2 parse error, 3 precondition error,
// 4 insufficient precision, 1 anything else.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "abmod/abmod.hpp"

namespace {

using abmod::AbModule;
using abmod::G;
using Json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw abmod::ParseError("cannot read file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// A module file plus what the retry loop needs to know about it:
/// constructor forms can be rebuilt at higher precision, matrix forms
/// carry only the coefficients written down.
struct Source {
    std::string path;
    std::string text;
    bool construct = false;

    explicit Source(const std::string& p) : path(p), text(read_file(p)) {
        try {
            Json j = Json::parse(text);
            construct = j.is_object() && j.contains("construct");
        } catch (const nlohmann::json::parse_error&) {
            // leave it to parse_module to report the position
        }
    }

    AbModule build(std::optional<std::size_t> prec) const {
        try {
            return abmod::parse_module(text, prec);
        } catch (const abmod::ParseError& ex) {
            throw abmod::ParseError(path + ": " + ex.what());
        }
    }
};

std::size_t precision_cap() {
    const char* env = std::getenv("ABMOD_MAX_PRECISION");
    if (!env) return 64;
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || v == 0)
        throw abmod::BadParameter("ABMOD_MAX_PRECISION must be a positive integer");
    return v;
}

/// Run an operation on the parsed modules; when it reports insufficient
/// precision and every input is a constructor form without an explicit
/// precision request, rebuild at the needed precision (or double) and
/// retry, up to ABMOD_MAX_PRECISION.
template <typename F>
void with_retries(const std::vector<const Source*>& srcs, std::optional<std::size_t> prec,
                  F&& run) {
    bool retryable = !prec.has_value();
    for (const Source* s : srcs) retryable = retryable && s->construct;
    std::size_t cap = precision_cap();
    std::optional<std::size_t> cur = prec;
    for (;;) {
        std::vector<AbModule> mods;
        mods.reserve(srcs.size());
        for (const Source* s : srcs) mods.push_back(s->build(cur));
        try {
            run(mods);
            return;
        } catch (const abmod::InsufficientPrecision& ex) {
            std::size_t have = ex.have;
            for (const AbModule& m : mods) have = std::max(have, m.order());
            std::size_t next = ex.need > have ? ex.need : 2 * have;
            if (!retryable || next <= have || next > cap) throw;
            cur = next;
        }
    }
}

std::string gstr(const G& z) { return abmod::format_coeff(z); }

Json spectrum_json(const AbModule& simple) {
    Json arr = Json::array();
    for (const auto& [value, mult] : simple.spectrum()) {
        Json item;
        item["value"] = gstr(value);
        item["multiplicity"] = mult;
        arr.push_back(item);
    }
    return arr;
}

void emit_report(const Json& rep) { std::cout << rep.dump(2) << "\n"; }

void emit_module(const AbModule& m, const std::string& out) {
    if (out.empty())
        std::cout << abmod::format_module(m);
    else
        abmod::save_module(m, out);
}

Json invariants_report(const AbModule& e) {
    Json rep;
    rep["rank"] = e.rank();
    rep["simple_pole"] = e.is_simple_pole();
    rep["or"] = abmod::regularity_order(e);
    rep["delta"] = abmod::index_delta(e);
    rep["spectrum_sharp"] = spectrum_json(abmod::saturate(e).module);
    rep["spectrum_b"] = spectrum_json(abmod::biggest_simple_pole(e).module);
    abmod::WidthReport w = abmod::widths(e);
    Json classes = Json::array();
    for (const abmod::ClassWidth& c : w.classes) {
        Json item;
        item["lambda_min"] = gstr(c.lambda_min);
        item["lambda_max"] = gstr(c.lambda_max);
        item["width"] = c.width_class;
        classes.push_back(item);
    }
    Json widths;
    widths["classes"] = classes;
    widths["width"] = w.width;
    rep["widths"] = widths;
    rep["alpha"] = gstr(abmod::alpha_invariant(e));
    Json jh = Json::array();
    for (const G& x : abmod::jordan_holder(e).exponents) jh.push_back(gstr(x));
    rep["jh_exponents"] = jh;
    rep["N0"] = abmod::determination_bound(e);
    return rep;
}

const char* variant_name(abmod::Rank2Variant v) {
    switch (v) {
    case abmod::Rank2Variant::Sum: return "Sum";
    case abmod::Rank2Variant::Log: return "Log";
    case abmod::Rank2Variant::Pair: return "Pair";
    case abmod::Rank2Variant::Alpha: return "Alpha";
    }
    return "Sum";
}

bool exact_intertwiner(const AbModule& e, const AbModule& f, const abmod::SMat& pw,
                       std::size_t n) {
    abmod::SMat res = e.matrix().truncated(n) * pw - pw * f.matrix().truncated(n) -
                      pw.derivative().mul_bpow(2);
    for (std::size_t i = 0; i < res.rows(); ++i)
        for (std::size_t j = 0; j < res.cols(); ++j)
            if (!res(i, j).truncated(n).is_zero()) return false;
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact invariants and jet isomorphisms of (a,b)-modules"};
    app.require_subcommand(1);

    std::string file_a, file_b, out_path;
    std::optional<std::size_t> precision;
    std::size_t order = 0;
    std::uint64_t seed = 1;

    CLI::App* inv = app.add_subcommand("invariants", "full invariant report of a module file");
    inv->add_option("file", file_a, "module file")->required();
    inv->add_option("--precision", precision, "working precision override");

    CLI::App* jiso = app.add_subcommand("jet-iso", "decide isomorphism of two jets");
    jiso->add_option("a", file_a, "left module file")->required();
    jiso->add_option("b", file_b, "right module file")->required();
    jiso->add_option("--order", order, "jet order")->required();
    jiso->add_option("--seed", seed, "seed for the randomized search");
    jiso->add_option("--precision", precision, "working precision override");

    CLI::App* dual = app.add_subcommand("dual", "write the dual module file");
    dual->add_option("file", file_a, "module file")->required();
    dual->add_option("--output", out_path, "output path (default stdout)");
    dual->add_option("--precision", precision, "working precision override");

    CLI::App* satc = app.add_subcommand("saturate", "write the saturation as a module file");
    satc->add_option("file", file_a, "module file")->required();
    satc->add_option("--output", out_path, "output path (default stdout)");
    satc->add_option("--precision", precision, "working precision override");

    CLI::App* cls = app.add_subcommand("classify", "normal form of a regular rank 2 module");
    cls->add_option("file", file_a, "module file")->required();
    cls->add_option("--precision", precision, "working precision override");

    CLI::App* jh = app.add_subcommand("jh", "composition exponents top to bottom");
    jh->add_option("file", file_a, "module file")->required();
    jh->add_option("--precision", precision, "working precision override");

    CLI::App* ext = app.add_subcommand("ext", "dimensions of Hom and Ext1");
    ext->add_option("a", file_a, "left module file")->required();
    ext->add_option("b", file_b, "right module file")->required();
    ext->add_option("--precision", precision, "working precision override");

    CLI::App* vb = app.add_subcommand("verify-bound",
                                      "check the determination bound on the module itself");
    vb->add_option("file", file_a, "module file")->required();
    vb->add_option("--precision", precision, "working precision override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (inv->parsed()) {
            Source src(file_a);
            with_retries({&src}, precision,
                         [&](const std::vector<AbModule>& m) { emit_report(invariants_report(m[0])); });
        } else if (jiso->parsed()) {
            Source sa(file_a), sb(file_b);
            with_retries({&sa, &sb}, precision, [&](const std::vector<AbModule>& m) {
                abmod::JetIsoResult r = abmod::jet_isomorphism(m[0], m[1], order, seed);
                Json rep;
                rep["order"] = order;
                switch (r.status) {
                case abmod::JetIsoResult::Status::Iso: rep["status"] = "Iso"; break;
                case abmod::JetIsoResult::Status::NotIso: rep["status"] = "NotIso"; break;
                case abmod::JetIsoResult::Status::UndecidedRandomized:
                    rep["status"] = "UndecidedRandomized";
                    break;
                }
                rep["trials"] = r.trials;
                if (r.witness) {
                    Json rows = Json::array();
                    for (std::size_t i = 0; i < r.witness->rows(); ++i) {
                        Json row = Json::array();
                        for (std::size_t j = 0; j < r.witness->cols(); ++j)
                            row.push_back(abmod::format_series((*r.witness)(i, j)));
                        rows.push_back(row);
                    }
                    rep["witness"] = rows;
                }
                emit_report(rep);
            });
        } else if (dual->parsed()) {
            Source src(file_a);
            with_retries({&src}, precision,
                         [&](const std::vector<AbModule>& m) { emit_module(m[0].dual(), out_path); });
        } else if (satc->parsed()) {
            Source src(file_a);
            with_retries({&src}, precision, [&](const std::vector<AbModule>& m) {
                emit_module(abmod::saturate(m[0]).module, out_path);
            });
        } else if (cls->parsed()) {
            Source src(file_a);
            with_retries({&src}, precision, [&](const std::vector<AbModule>& m) {
                abmod::ClassificationRank2 c = abmod::classify_rank2(m[0]);
                Json rep;
                rep["variant"] = variant_name(c.variant);
                rep["lambda"] = gstr(c.lambda);
                rep["mu"] = gstr(c.mu);
                rep["n"] = c.n;
                rep["alpha"] = gstr(c.alpha);
                emit_report(rep);
            });
        } else if (jh->parsed()) {
            Source src(file_a);
            with_retries({&src}, precision, [&](const std::vector<AbModule>& m) {
                Json rep;
                rep["rank"] = m[0].rank();
                Json exps = Json::array();
                for (const G& x : abmod::jordan_holder(m[0]).exponents) exps.push_back(gstr(x));
                rep["exponents"] = exps;
                emit_report(rep);
            });
        } else if (ext->parsed()) {
            Source sa(file_a), sb(file_b);
            with_retries({&sa, &sb}, precision, [&](const std::vector<AbModule>& m) {
                abmod::ExtDims d = abmod::ext_dims(m[0], m[1]);
                Json rep;
                rep["ext0"] = d.ext0;
                rep["ext1"] = d.ext1;
                emit_report(rep);
            });
        } else if (vb->parsed()) {
            Source src(file_a);
            with_retries({&src}, precision, [&](const std::vector<AbModule>& m) {
                const AbModule& e = m[0];
                std::size_t n0 = abmod::determination_bound(e);
                abmod::JetIsoResult r = abmod::jet_isomorphism(e, e, n0);
                if (!r.is_iso())
                    throw abmod::CrossCheckFailed("self jet isomorphism failed at the bound");
                abmod::SMat full = abmod::lift_jet_isomorphism(e, e, r);
                if (!exact_intertwiner(e, e, full, full.order()))
                    throw abmod::CrossCheckFailed("lifted witness fails the intertwining check");
                Json rep;
                rep["N0"] = n0;
                rep["jet_status"] = "Iso";
                rep["lift_order"] = full.order();
                rep["verified"] = true;
                emit_report(rep);
            });
        }
        return 0;
    } catch (const abmod::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const abmod::InsufficientPrecision& e) {
        std::cerr << "error: " << e.what() << " (have " << e.have;
        if (e.need) std::cerr << ", need " << e.need;
        std::cerr << ")\n";
        return 4;
    } catch (const abmod::PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const abmod::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
