// Strict JSON documents (ensemble in, solution out, certificate round-trip)
// and the sweep CSV. Unknown fields are rejected; complex entries are
// [re, im] pairs.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "qsd/certificate.hpp"
#include "qsd/ensemble.hpp"
#include "qsd/measurement.hpp"
#include "qsd/symmetry.hpp"

namespace qsd {

using Json = nlohmann::json;

struct EnsembleDocument {
    int n = 0;
    std::optional<std::vector<StateInput>> states;
    std::optional<GuSpec> gu;
    std::optional<CguSpec> cgu;
};

struct SolutionDocument {
    double beta = 0.0;
    std::string method;
    ProbabilityTriple triple;
    int iterations = 0;
    RejectingMeasurement measurement;
    std::optional<OptimalityCertificate> certificate;
};

struct SweepRow {
    double beta = 0.0;
    double p_d = 0.0;
    double p_e = 0.0;
    double p_i = 0.0;
    double gap = 0.0;
    int iters = 0;
    std::string method;
};

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

Json matrix_to_json(const Mat& a);
Mat matrix_from_json(const Json& j, const std::string& what);

// Structural errors throw ParseError; group validation (unitarity, closure)
// surfaces the symmetry module's error codes.
EnsembleDocument parse_ensemble_document(const std::string& text, const Tolerances& tol = {});
StateEnsemble realize_ensemble(const EnsembleDocument& doc, const Tolerances& tol = {});

Json measurement_to_json(const RejectingMeasurement& meas);
RejectingMeasurement measurement_from_json(const Json& j);
Json certificate_to_json(const OptimalityCertificate& cert);
Json report_to_json(const ResidualReport& report);

Json solution_to_json(const SolutionDocument& doc, const std::optional<ResidualReport>& report);
SolutionDocument parse_solution_document(const std::string& text);

// Header beta,p_d,p_e,p_i,gap,iters,method; one row per grid point.
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

}  // namespace qsd
