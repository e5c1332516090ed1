#ifndef NMFID_JSON_REPORT_HPP
#define NMFID_JSON_REPORT_HPP

// JSON serialization of analysis results.  Conventions, fixed for byte
// reproducibility: schema_version 1; keys emitted in sorted order (the
// default nlohmann::json object is an ordered map over sorted keys); all
// row/column/inner/member indices are 1-based in reports; exact scalars are
// emitted as strings ("3/4") so no precision is lost, floating scalars as
// JSON numbers.

#include <string>
#include <vector>

#include <json.hpp>

#include "nmfid/block.hpp"
#include "nmfid/certify.hpp"
#include "nmfid/classify.hpp"
#include "nmfid/scalar.hpp"
#include "nmfid/sfa.hpp"
#include "nmfid/solve.hpp"
#include "nmfid/version.hpp"

namespace nmfid {

using json = nlohmann::json;

template <typename T>
json scalar_to_json(const T& x) {
    if constexpr (is_exact_v<T>)
        return format_scalar(x);
    else
        return x;
}

template <typename T>
json matrix_to_json(const Matrix<T>& m) {
    json rows = json::array();
    for (index_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (index_t j = 0; j < m.cols(); ++j) row.push_back(scalar_to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json indices_to_json(const std::vector<index_t>& v) {
    json out = json::array();
    for (index_t i : v) out.push_back(i + 1);
    return out;
}

inline json index_sets_to_json(const std::vector<std::vector<index_t>>& sets) {
    json out = json::array();
    for (const auto& s : sets) out.push_back(indices_to_json(s));
    return out;
}

inline json certificate_to_json(const CertificateReport& r) {
    json out;
    out["condition"] = r.condition;
    out["reference"] = r.reference;
    out["verdict"] = to_string(r.verdict);
    out["notes"] = r.notes;
    out["flags"] = r.flags;
    out["witness_rows"] = indices_to_json(r.witness_rows);
    out["witness_cols"] = indices_to_json(r.witness_cols);
    out["witness_sets"] = index_sets_to_json(r.witness_sets);
    json viol = json::array();
    for (auto [a, b] : r.violations) viol.push_back(json::array({a + 1, b + 1}));
    out["violations"] = viol;
    return out;
}

inline json support_sets_to_json(const SupportSets& s) {
    json out;
    out["w_column_supports"] = index_sets_to_json(s.w_col_support);
    out["h_row_supports"] = index_sets_to_json(s.h_row_support);
    return out;
}

template <typename T>
json pair_witness_to_json(const PairWitness<T>& w) {
    json out;
    out["first_member"] = w.first + 1;
    out["second_member"] = w.second + 1;
    out["relation"] = w.relation;
    out["q"] = matrix_to_json(w.q);
    return out;
}

template <typename T>
json type_verdict_to_json(const TypeVerdict<T>& v) {
    json out;
    out["kind"] = to_string(v.kind);
    out["subspace_groups"] = index_sets_to_json(v.subspace_groups);
    auto pack = [](const std::vector<PairWitness<T>>& ws) {
        json arr = json::array();
        for (const auto& w : ws) arr.push_back(pair_witness_to_json(w));
        return arr;
    };
    out["monomial_witnesses"] = pack(v.monomial_witnesses);
    out["basis_witnesses"] = pack(v.basis_witnesses);
    out["cross_witnesses"] = pack(v.cross_witnesses);
    out["degenerate_rank_deficient"] = v.degenerate_rank_deficient;
    out["notes"] = v.notes;
    return out;
}

inline json rank_bounds_to_json(const RankBounds& b, bool include_witness = true) {
    json out;
    out["lower"] = b.lower;
    out["upper"] = b.upper;
    out["tight"] = b.tight();
    json scan = json::array();
    for (auto [r, res] : b.scan_log) {
        json entry;
        entry["inner_dimension"] = r;
        entry["best_residual"] = res;
        scan.push_back(std::move(entry));
    }
    out["scan"] = scan;
    if (include_witness && b.upper_witness) {
        json wit;
        wit["w"] = matrix_to_json(b.upper_witness->w);
        wit["h"] = matrix_to_json(b.upper_witness->h);
        out["upper_witness"] = std::move(wit);
    }
    return out;
}

inline json block_to_json(const Block& b) {
    json out;
    out["w_rows"] = indices_to_json(b.w_rows);
    out["inner"] = indices_to_json(b.inner);
    out["h_cols"] = indices_to_json(b.h_cols);
    return out;
}

inline json decomposition_to_json(const BlockDecomposition& d) {
    json out;
    out["block_count"] = d.block_count();
    out["inner_permutation"] = indices_to_json(d.inner_permutation);
    json blocks = json::array();
    for (const Block& b : d.blocks) blocks.push_back(block_to_json(b));
    out["blocks"] = blocks;
    out["compatibility_ok"] = d.compatibility_ok;
    out["compatibility_notes"] = d.compatibility_notes;
    return out;
}

inline json block_analysis_to_json(const BlockAnalysis& a) {
    json out;
    out["block"] = a.block_index + 1;
    out["verdict"] = to_string(a.verdict);
    out["reason"] = a.reason;
    json certs = json::array();
    for (const auto& c : a.certificates) certs.push_back(certificate_to_json(c));
    out["certificates"] = certs;
    return out;
}

inline json blockwise_report_to_json(const BlockwiseReport& r) {
    json out;
    out["aggregate"] = to_string(r.aggregate);
    json blocks = json::array();
    for (const auto& a : r.per_block) blocks.push_back(block_analysis_to_json(a));
    out["per_block"] = blocks;
    return out;
}

inline json indexing_to_json(const PartArticulationIndexing& idx) {
    json out;
    out["parts"] = idx.parts();
    out["articulations"] = idx.articulations();
    json map = json::array();
    for (index_t r = 0; r < idx.inner(); ++r) {
        auto [p, a] = idx.pa_of(r);
        json entry;
        entry["inner"] = r + 1;
        entry["part"] = p + 1;
        entry["articulation"] = a + 1;
        map.push_back(std::move(entry));
    }
    out["inner_to_part_articulation"] = map;
    return out;
}

inline json sfa_certificate_to_json(const SfaCertificate& c) {
    json out;
    out["indexing"] = indexing_to_json(c.indexing);
    out["detector_rows"] = index_sets_to_json(c.witness.row_of);
    out["binary_h"] = c.binary_h;
    out["core_rows"] = indices_to_json(c.core_rows);
    out["extra_rows"] = indices_to_json(c.extra_rows);
    out["flags"] = c.flags;
    return out;
}

template <typename T>
json invariant_row_to_json(const InvariantRowRecord<T>& r) {
    json out;
    out["row"] = r.row + 1;
    out["part"] = r.part + 1;
    out["epsilon"] = scalar_to_json(r.epsilon);
    json v = json::array();
    for (const T& x : r.v) v.push_back(scalar_to_json(x));
    out["values"] = v;
    return out;
}

template <typename T>
json solution_family_to_json(const SolutionFamily<T>& f, bool include_base = true) {
    json out;
    out["indexing"] = indexing_to_json(f.indexing);
    json recs = json::array();
    for (const auto& r : f.records) recs.push_back(invariant_row_to_json(r));
    out["invariant_rows"] = recs;
    out["free_parameters"] = f.records.size() == 0
                                 ? 0
                                 : f.records.size() * (f.indexing.parts() - 1);
    if (include_base) {
        json base;
        base["w"] = matrix_to_json(f.base.w);
        base["h"] = matrix_to_json(f.base.h);
        out["base"] = std::move(base);
    }
    return out;
}

// Top-level envelope shared by every CLI report.
inline json report_envelope(const std::string& command) {
    json out;
    out["schema_version"] = kReportSchemaVersion;
    out["generator"] = std::string("nmfid ") + kVersion;
    out["command"] = command;
    return out;
}

inline std::string dump_report(const json& j) { return j.dump(2) + "\n"; }

}  // namespace nmfid

#endif  // NMFID_JSON_REPORT_HPP
