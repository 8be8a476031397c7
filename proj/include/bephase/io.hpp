#pragma once

#include <string>

#include <json.hpp>

#include "bephase/distill.hpp"
#include "bephase/protocol.hpp"
#include "bephase/states.hpp"
#include "bephase/witness.hpp"

namespace bephase::io {

using json = nlohmann::json;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// matrix-json: row-major array of rows of [re, im] pairs
json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json& j);

// {"dim_a", "dim_b", "matrix"}
json state_to_json(const DensityOperator& rho);
DensityOperator state_from_json(const json& j);

// {"dim_a", "dim_b", "amps"}
json vector_to_json(const BipartiteVector& v);
BipartiteVector vector_from_json(const json& j);

// FNV-1a 64 over the canonical 17-digit serialization
std::string state_hash(const DensityOperator& rho);

// {"p", "value", "psi", "state_ref"}
json witness_to_json(const WitnessValue& wv, const std::string& state_ref);
WitnessValue witness_from_json(const json& j);
// Deserialized certificates are revalidated against the source state: the
// stored value must match the from-scratch recomputation to 1e-12.
WitnessValue witness_from_json_validated(const json& j, const DensityOperator& rho);

json certificate_to_json(const DistillCertificate& cert, const std::string& state_ref);
DistillCertificate certificate_from_json(const json& j);

json ball_report_to_json(const BallReport& report);

// {"m", "F", "p", "filter", "witness"}
json schmidt_certificate_to_json(const SchmidtCertificate& cert, const std::string& state_ref);

// {"P", "Q", "epsilon"}
json edge_witness_to_json(const EdgeWitness& w);
EdgeWitness edge_witness_from_json(const json& j);

// Serializer with doubles at 17 significant digits: certificates re-load
// bit-exactly and reruns are byte-identical. Keys emit in nlohmann's sorted
// order.
std::string dump_json_17(const json& j, int indent = 2);

void write_text_file(const std::string& path, const std::string& text);
json read_json_file(const std::string& path);

}  // namespace bephase::io
