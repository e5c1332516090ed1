// nmfid: identifiability analysis of exact nonnegative matrix
// factorizations.  Subcommands: analyze, verify, enumerate, decompose,
// generate.  Exit codes: 0 success; 1 parse/dimension errors; 2 inexact
// factorization where exactness is required; 3 combinatorial guard limits
// exceeded.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nmfid/block.hpp"
#include "nmfid/certify.hpp"
#include "nmfid/classify.hpp"
#include "nmfid/corpus.hpp"
#include "nmfid/io.hpp"
#include "nmfid/json_report.hpp"
#include "nmfid/linalg.hpp"
#include "nmfid/sfa.hpp"
#include "nmfid/solve.hpp"
#include "nmfid/version.hpp"

namespace fs = std::filesystem;
using nmfid::index_t;
using nmfid::json;
using nmfid::Matrix;
using nmfid::Rational;

namespace {

struct CommonOpts {
    double tol = nmfid::kDefaultTol;
    bool exact = false;
};

struct AnalyzeOpts : CommonOpts {
    std::string input;
    std::vector<std::string> w_paths;
    std::vector<std::string> h_paths;
    index_t rank_hint = 0;
    index_t parts = 0;
    index_t arts = 0;
    std::string out;
};

struct VerifyOpts : CommonOpts {
    std::string input, w_path, h_path;
};

struct EnumerateOpts : CommonOpts {
    std::string input, w_path, h_path;
    index_t parts = 0;
    index_t arts = 0;
    index_t samples = 5;
    std::string out_dir;
};

struct DecomposeOpts : CommonOpts {
    std::string g_path, w_path, h_path;
    std::string out;
};

struct GenerateOpts {
    std::string name;
    bool no_body = false;
    std::string out_dir = ".";
};

void write_report(const std::string& path, const json& j) {
    nmfid::write_text_file(path, nmfid::dump_report(j));
    std::cout << "report written to " << path << "\n";
}

template <typename T>
void write_matrix(const fs::path& path, const Matrix<T>& m) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    nmfid::write_matrix_csv(os, m);
}

const char* arithmetic_name(bool exact) { return exact ? "rational" : "double"; }

void print_certificate_table(const std::vector<nmfid::CertificateReport>& certs) {
    if (certs.empty()) return;
    std::cout << "\n  " << std::left << std::setw(28) << "condition" << std::setw(9) << "verdict"
              << "reference\n";
    std::cout << "  " << std::string(78, '-') << "\n";
    for (const auto& c : certs) {
        std::cout << "  " << std::left << std::setw(28) << c.condition << std::setw(9)
                  << nmfid::to_string(c.verdict) << c.reference << "\n";
        if (!c.notes.empty()) std::cout << "      " << c.notes << "\n";
    }
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

template <typename T>
int run_analyze(const AnalyzeOpts& o) {
    Matrix<T> s = nmfid::read_matrix_file<T>(o.input);
    if (o.w_paths.size() != o.h_paths.size())
        throw std::invalid_argument("--w and --h must be given the same number of times");

    json report = nmfid::report_envelope("analyze");
    report["arithmetic"] = arithmetic_name(nmfid::is_exact_v<T>);
    report["tolerance"] = o.tol;
    report["input"] = {{"path", o.input}, {"rows", s.rows()}, {"cols", s.cols()}};

    // Load and verify the provided factorizations; the certification and
    // classification stages require exactness.
    std::vector<nmfid::Factorization<T>> facts;
    json fact_json = json::array();
    for (std::size_t i = 0; i < o.w_paths.size(); ++i) {
        nmfid::Factorization<T> f(nmfid::read_matrix_file<T>(o.w_paths[i]),
                                  nmfid::read_matrix_file<T>(o.h_paths[i]));
        if (f.w.rows() != s.rows() || f.h.cols() != s.cols())
            throw std::invalid_argument("factorization " + std::to_string(i + 1) +
                                        " does not match the shape of S");
        double residual = nmfid::verify_exact(s, f);
        if (!nmfid::is_exact_factorization(s, f, o.tol)) {
            std::ostringstream msg;
            msg << "factorization " << i + 1 << " is not exact (residual " << residual << ")";
            throw nmfid::InexactFactorizationError(msg.str());
        }
        json fj;
        fj["w_path"] = o.w_paths[i];
        fj["h_path"] = o.h_paths[i];
        fj["inner_rank"] = f.inner_rank();
        fj["residual"] = residual;
        fact_json.push_back(std::move(fj));
        facts.push_back(std::move(f));
    }
    report["factorizations"] = fact_json;

    // Rank bounds: linear rank below, provided witnesses and (for small
    // instances) a solver scan above.
    nmfid::RankBounds bounds;
    bounds.lower = nmfid::rank(s, o.tol);
    bounds.upper = std::min(s.rows(), s.cols());
    for (const auto& f : facts) bounds.upper = std::min(bounds.upper, f.inner_rank());
    const index_t scan_cap = 32;
    if (std::min(s.rows(), s.cols()) <= scan_cap && bounds.lower < bounds.upper) {
        nmfid::SolveConfig cfg;
        nmfid::RankBounds scanned = nmfid::nonneg_rank_bounds(s, cfg);
        bounds.scan_log = scanned.scan_log;
        if (scanned.upper < bounds.upper) {
            bounds.upper = scanned.upper;
            bounds.upper_witness = std::move(scanned.upper_witness);
        }
    } else if (o.rank_hint > 0 && o.rank_hint < bounds.upper && o.rank_hint >= bounds.lower) {
        nmfid::SolveConfig cfg;
        cfg.target_rank = o.rank_hint;
        nmfid::SolveDetail detail;
        nmfid::Factorization<double> f =
            nmfid::nmf_solve_best(s.to_double_matrix(), cfg, 20, &detail);
        bounds.scan_log.emplace_back(o.rank_hint, detail.residual);
        if (detail.residual <= cfg.stop_tol) {
            bounds.upper = o.rank_hint;
            bounds.upper_witness = std::move(f);
        }
    }
    report["rank_bounds"] = nmfid::rank_bounds_to_json(bounds, false);

    // Certificates on the first factorization.
    std::vector<nmfid::CertificateReport> certs;
    std::optional<nmfid::SfaCertificate> sfa;
    if (!facts.empty()) {
        const auto& f = facts.front();
        certs.push_back(nmfid::check_boundary_close(f.w, o.tol));
        certs.push_back(nmfid::check_strongly_boundary_close(f.w, o.tol));
        certs.push_back(nmfid::check_sufficiently_spread(f.h, o.tol));
        nmfid::HuangResult huang = nmfid::check_huang(f.w, f.h, o.tol);
        certs.push_back(huang.report);
        report["supports"] = nmfid::support_sets_to_json(huang.supports);

        // Separable factorial structure: explicit shape if given, else a
        // divisor scan over the inner dimension.
        const index_t r_count = f.inner_rank();
        if (o.parts > 0 && o.arts > 0) {
            if (o.parts * o.arts != r_count)
                throw std::invalid_argument("--parts * --arts must equal the inner dimension");
            sfa = nmfid::detect_sfa(f, o.parts, o.arts, o.tol);
        } else {
            for (index_t p = 2; p * 2 <= r_count && !sfa; ++p) {
                if (r_count % p != 0) continue;
                sfa = nmfid::detect_sfa(f, p, r_count / p, o.tol);
            }
        }
        if (sfa) {
            certs.push_back(nmfid::check_donoho(s, f, sfa->indexing, o.tol));
            report["sfa"] = nmfid::sfa_certificate_to_json(*sfa);
            if (sfa->binary_h) {
                nmfid::Type2Evidence<T> ev = nmfid::is_type2_nonidentifiable(f, *sfa, o.tol);
                json ej;
                ej["non_identifiable"] = ev.non_identifiable;
                json rows = json::array();
                for (const auto& r : ev.records) rows.push_back(nmfid::invariant_row_to_json(r));
                ej["invariant_rows"] = rows;
                report["redistribution"] = ej;
                if (ev.non_identifiable) {
                    nmfid::SolutionFamily<T> fam = nmfid::make_solution_family(f, *sfa, o.tol);
                    report["family"] = nmfid::solution_family_to_json(fam, false);
                }
                nmfid::RankDeficit rd = nmfid::rank_deficit_check(f, *sfa, o.tol);
                report["rank_deficit"] = {
                    {"rank", rd.rank_s}, {"inner", rd.inner}, {"deficit", rd.deficit}};
            }
        } else {
            report["sfa"] = nullptr;
        }
    }
    json cj = json::array();
    for (const auto& c : certs) cj.push_back(nmfid::certificate_to_json(c));
    report["certificates"] = cj;

    // Classification of the provided solution set.
    if (!facts.empty()) {
        nmfid::SolutionSet<T> ss(s, facts, o.tol);
        nmfid::TypeVerdict<T> verdict = nmfid::classify_solution_set(ss, o.tol);
        report["type"] = nmfid::type_verdict_to_json(verdict);
        std::cout << "type: " << nmfid::to_string(verdict.kind) << "\n";
    }

    // Block structure of the first factorization (as a model with G = I).
    if (!facts.empty()) {
        const auto& f = facts.front();
        nmfid::BlockDecomposition d = nmfid::find_block_structure(f.w, f.h, o.tol);
        report["blocks"] = nmfid::decomposition_to_json(d);
        try {
            nmfid::BlockModel<T> m(Matrix<T>::identity(f.w.rows()), f.w, f.h, o.tol);
            nmfid::BlockwiseReport bw = nmfid::blockwise_identifiability(m, d, o.tol);
            report["blockwise"] = nmfid::blockwise_report_to_json(bw);
        } catch (const nmfid::CombinatorialLimitError&) {
            report["blockwise"] = nullptr;  // guard tripped inside a sub-analysis
        } catch (const std::invalid_argument& e) {
            report["blockwise"] = nullptr;
            report["blockwise_note"] = e.what();
        }
    }

    std::cout << "rank bounds: [" << bounds.lower << ", " << bounds.upper << "]"
              << (bounds.tight() ? " (tight)" : "") << "\n";
    print_certificate_table(certs);
    if (!o.out.empty()) write_report(o.out, report);
    return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

template <typename T>
int run_verify(const VerifyOpts& o) {
    Matrix<T> s = nmfid::read_matrix_file<T>(o.input);
    nmfid::Factorization<T> f(nmfid::read_matrix_file<T>(o.w_path),
                              nmfid::read_matrix_file<T>(o.h_path));
    if (f.w.rows() != s.rows() || f.h.cols() != s.cols())
        throw std::invalid_argument("factor shapes do not match S");
    double residual = nmfid::verify_exact(s, f);
    if (!nmfid::is_exact_factorization(s, f, o.tol)) {
        std::cout << "NOT EXACT: residual " << residual << "\n";
        throw nmfid::InexactFactorizationError("W*H does not equal S");
    }
    std::cout << "exact: " << s.rows() << "x" << s.cols() << " = (" << s.rows() << "x"
              << f.inner_rank() << ")(" << f.inner_rank() << "x" << s.cols() << "), residual "
              << residual << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// enumerate
// ---------------------------------------------------------------------------

template <typename T>
int run_enumerate(const EnumerateOpts& o) {
    Matrix<T> s = nmfid::read_matrix_file<T>(o.input);
    nmfid::Factorization<T> f(nmfid::read_matrix_file<T>(o.w_path),
                              nmfid::read_matrix_file<T>(o.h_path));
    if (!nmfid::is_exact_factorization(s, f, o.tol))
        throw nmfid::InexactFactorizationError("family enumeration requires an exact factorization");
    if (o.samples < 1) throw std::invalid_argument("--samples must be at least 1");

    std::optional<nmfid::SfaCertificate> sfa = nmfid::detect_sfa(f, o.parts, o.arts, o.tol);
    if (!sfa)
        throw std::invalid_argument("no separable factorial articulation structure with the "
                                    "requested shape");
    nmfid::SolutionFamily<T> fam = nmfid::make_solution_family(f, *sfa, o.tol);

    fs::create_directories(o.out_dir);
    json manifest = nmfid::report_envelope("enumerate");
    manifest["arithmetic"] = arithmetic_name(nmfid::is_exact_v<T>);
    manifest["family"] = nmfid::solution_family_to_json(fam, false);
    json samples = json::array();

    const index_t p_count = fam.indexing.parts();
    const index_t k_count = fam.records.empty() ? 1 : o.samples;
    if (fam.records.empty())
        manifest["note"] = "no invariant rows: the family is the single base factorization";
    for (index_t k = 0; k < k_count; ++k) {
        // Interpolate each record's weights from its own part (t = 0, the
        // base member) toward the uniform distribution (t = 1).
        T t = k_count == 1 ? T(0) : T(static_cast<int>(k)) / T(static_cast<int>(k_count - 1));
        std::vector<std::vector<T>> thetas;
        for (const auto& rec : fam.records) {
            std::vector<T> theta(p_count, t / T(static_cast<int>(p_count)));
            theta[rec.part] += T(1) - t;
            thetas.push_back(std::move(theta));
        }
        nmfid::Factorization<T> member = nmfid::family_member(fam, thetas, o.tol);
        if (!nmfid::is_exact_factorization(s, member, o.tol))
            throw std::logic_error("family member failed re-verification");
        fs::path dir = fs::path(o.out_dir) / ("member_" + std::to_string(k));
        fs::create_directories(dir);
        write_matrix(dir / "W.csv", member.w);
        write_matrix(dir / "H.csv", member.h);
        json sj;
        sj["index"] = k;
        sj["t"] = nmfid::scalar_to_json(t);
        sj["dir"] = dir.filename().string();
        samples.push_back(std::move(sj));
    }
    manifest["samples"] = samples;
    write_report((fs::path(o.out_dir) / "manifest.json").string(), manifest);
    std::cout << "wrote " << k_count << " family member(s) to " << o.out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// decompose
// ---------------------------------------------------------------------------

template <typename T>
int run_decompose(const DecomposeOpts& o) {
    nmfid::BlockModel<T> m(nmfid::read_matrix_file<T>(o.g_path),
                           nmfid::read_matrix_file<T>(o.w_path),
                           nmfid::read_matrix_file<T>(o.h_path), o.tol);
    nmfid::BlockDecomposition d = nmfid::find_block_structure(m.w, m.h, o.tol);
    std::vector<nmfid::BlockModel<T>> subs = nmfid::direct_sum_decompose(m, d, o.tol);
    Matrix<T> rebuilt = nmfid::reassemble(m, d, subs);
    bool reassembly_ok = nmfid::is_exact_factorization(
        m.product(), nmfid::Factorization<T>(rebuilt, Matrix<T>::identity(rebuilt.cols())), o.tol);
    nmfid::BlockwiseReport bw = nmfid::blockwise_identifiability(m, d, o.tol);

    json report = nmfid::report_envelope("decompose");
    report["arithmetic"] = arithmetic_name(nmfid::is_exact_v<T>);
    report["tolerance"] = o.tol;
    report["model"] = {{"rows", m.g.rows()},
                      {"mixing", m.g.cols()},
                      {"inner", m.w.cols()},
                      {"cols", m.h.cols()}};
    report["decomposition"] = nmfid::decomposition_to_json(d);
    report["reassembly_ok"] = reassembly_ok;
    report["blockwise"] = nmfid::blockwise_report_to_json(bw);

    std::cout << "blocks: " << d.block_count() << ", aggregate verdict: "
              << nmfid::to_string(bw.aggregate) << "\n";
    for (const auto& a : bw.per_block)
        std::cout << "  block " << a.block_index + 1 << ": " << nmfid::to_string(a.verdict)
                  << " (" << a.reason << ")\n";
    if (!o.out.empty()) write_report(o.out, report);
    return 0;
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

int run_generate(const GenerateOpts& o) {
    fs::create_directories(o.out_dir);
    fs::path dir(o.out_dir);

    nmfid::NamedInstance<Rational> inst =
        o.name == "swimmer" ? nmfid::swimmer<Rational>(!o.no_body)
                            : nmfid::worked_example<Rational>(o.name);

    json meta = nmfid::report_envelope("generate");
    meta["name"] = inst.name;
    meta["rows"] = inst.s.rows();
    meta["cols"] = inst.s.cols();
    json files = json::array();

    auto emit = [&](const std::string& fname, const Matrix<Rational>& m) {
        write_matrix(dir / fname, m);
        files.push_back(fname);
    };
    emit("S.csv", inst.s);
    for (std::size_t i = 0; i < inst.factorizations.size(); ++i) {
        emit("W" + std::to_string(i + 1) + ".csv", inst.factorizations[i].w);
        emit("H" + std::to_string(i + 1) + ".csv", inst.factorizations[i].h);
    }
    for (const auto& [key, m] : inst.extras) emit(key + ".csv", m);

    if (o.name == "swimmer") {
        for (index_t j = 0; j < inst.s.cols(); ++j) {
            std::string fname = "swim_" + nmfid::swimmer_code(j) + ".pgm";
            std::ofstream os(dir / fname);
            if (!os) throw std::runtime_error("cannot open " + fname + " for writing");
            nmfid::write_pgm_p2(os, nmfid::swimmer_frame_image(inst.s, j), 1);
            files.push_back(fname);
        }
    }

    json expected;
    if (!inst.expected.type_kind.empty()) expected["type"] = inst.expected.type_kind;
    if (inst.expected.rank) expected["rank"] = *inst.expected.rank;
    if (inst.expected.nonneg_rank) expected["nonneg_rank"] = *inst.expected.nonneg_rank;
    if (inst.expected.block_count) expected["block_count"] = *inst.expected.block_count;
    if (inst.expected.parts) expected["parts"] = *inst.expected.parts;
    if (inst.expected.articulations) expected["articulations"] = *inst.expected.articulations;
    meta["expected"] = expected;
    meta["files"] = files;
    write_report((dir / "expected.json").string(), meta);
    std::cout << "generated " << inst.name << " (" << inst.s.rows() << "x" << inst.s.cols()
              << ") in " << o.out_dir << "\n";
    return 0;
}

template <typename F>
int dispatch(F&& body) {
    try {
        return body();
    } catch (const nmfid::CombinatorialLimitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const nmfid::InexactFactorizationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"identifiability analysis of exact nonnegative matrix factorizations"};
    // Long-only help: the documented --h option needs the short name free.
    app.set_help_flag("--help", "print help and exit");
    app.set_version_flag("--version", std::string("nmfid ") + nmfid::kVersion);
    app.require_subcommand(1);

    AnalyzeOpts ao;
    CLI::App* analyze = app.add_subcommand("analyze", "full identifiability pipeline");
    analyze->set_help_flag("--help", "print help and exit");
    analyze->add_option("--input", ao.input, "target matrix S (CSV)")->required();
    analyze->add_option("--w", ao.w_paths, "factor W (repeatable, paired with --h)");
    analyze->add_option("--h", ao.h_paths, "factor H (repeatable, paired with --w)");
    analyze->add_option("--rank", ao.rank_hint, "inner dimension for a targeted solver attempt");
    analyze->add_option("--parts", ao.parts, "number of parts P");
    analyze->add_option("--arts", ao.arts, "number of articulations A");
    analyze->add_option("--tol", ao.tol, "numerical tolerance");
    analyze->add_flag("--exact", ao.exact, "use exact rational arithmetic");
    analyze->add_option("--out", ao.out, "write JSON report here");

    VerifyOpts vo;
    CLI::App* verify = app.add_subcommand("verify", "check S = W*H exactly");
    verify->set_help_flag("--help", "print help and exit");
    verify->add_option("--input", vo.input, "target matrix S (CSV)")->required();
    verify->add_option("--w", vo.w_path, "factor W (CSV)")->required();
    verify->add_option("--h", vo.h_path, "factor H (CSV)")->required();
    verify->add_option("--tol", vo.tol, "numerical tolerance");
    verify->add_flag("--exact", vo.exact, "use exact rational arithmetic");

    EnumerateOpts eo;
    CLI::App* enumerate = app.add_subcommand("enumerate", "write solution-family members");
    enumerate->set_help_flag("--help", "print help and exit");
    enumerate->add_option("--input", eo.input, "target matrix S (CSV)")->required();
    enumerate->add_option("--w", eo.w_path, "factor W (CSV)")->required();
    enumerate->add_option("--h", eo.h_path, "factor H (CSV)")->required();
    enumerate->add_option("--parts", eo.parts, "number of parts P")->required();
    enumerate->add_option("--arts", eo.arts, "number of articulations A")->required();
    enumerate->add_option("--samples", eo.samples, "number of members to write");
    enumerate->add_option("--tol", eo.tol, "numerical tolerance");
    enumerate->add_flag("--exact", eo.exact, "use exact rational arithmetic");
    enumerate->add_option("--out", eo.out_dir, "output directory")->required();

    DecomposeOpts co;
    CLI::App* decompose = app.add_subcommand("decompose", "block-decompose a model S = G*W*H");
    decompose->set_help_flag("--help", "print help and exit");
    decompose->add_option("--g", co.g_path, "mixing factor G (CSV)")->required();
    decompose->add_option("--w", co.w_path, "factor W (CSV)")->required();
    decompose->add_option("--h", co.h_path, "factor H (CSV)")->required();
    decompose->add_option("--tol", co.tol, "numerical tolerance");
    decompose->add_flag("--exact", co.exact, "use exact rational arithmetic");
    decompose->add_option("--out", co.out, "write JSON report here");

    GenerateOpts go;
    CLI::App* generate = app.add_subcommand("generate", "write a benchmark instance to disk");
    generate->set_help_flag("--help", "print help and exit");
    generate
        ->add_option("name", go.name,
                     "one of: example1, type1, type2, type3, block-g, swimmer")
        ->required();
    generate->add_flag("--no-body", go.no_body, "swimmer only: omit the torso");
    generate->add_option("--out", go.out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (*analyze)
        return dispatch([&] { return ao.exact ? run_analyze<Rational>(ao) : run_analyze<double>(ao); });
    if (*verify)
        return dispatch([&] { return vo.exact ? run_verify<Rational>(vo) : run_verify<double>(vo); });
    if (*enumerate)
        return dispatch(
            [&] { return eo.exact ? run_enumerate<Rational>(eo) : run_enumerate<double>(eo); });
    if (*decompose)
        return dispatch(
            [&] { return co.exact ? run_decompose<Rational>(co) : run_decompose<double>(co); });
    if (*generate) return dispatch([&] { return run_generate(go); });
    return 1;  // unreachable: a subcommand is required
}
