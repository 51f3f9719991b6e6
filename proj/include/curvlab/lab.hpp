#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "curvlab/bundle.hpp"
#include "curvlab/pde.hpp"
#include "curvlab/stratify.hpp"

namespace curvlab {

// kind 1: z^a; kind 2: z^a (z^n - 1); kind 3: z^a prod_i (z^n - q_i).
struct FamilyParams {
    int kind = 1;
    int a = 1;
    int n = 0;
    std::vector<cplx> q;
    // false: only require that g fits in degree k-2, skipping the existence
    // hypotheses (audits of classes they do not cover).
    bool strict = true;
};

struct ExperimentConfig {
    std::string experiment = "sweep";
    BundleSpec spec{0, 4};
    std::optional<FamilyParams> family;
    std::vector<cplx> coefficients;  // explicit g when no family is given
    std::vector<cplx> b;             // explicit dual coordinates for classify
    ExactVec b_exact;                // same, when given as rational strings
    std::vector<double> lambdas;
    SolveConfig solver;
    double classifier_tol = 1e-8;
    bool exact = false;
    std::string out_dir = "out";
    std::string prefix = "run";
    std::uint64_t seed = 1;
    RadialConfig radial;
};

// Throws InvalidArgument on schema or field errors.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& cfg);
// 16 hex digits of FNV-1a over the canonical JSON dump.
std::string config_hash(const ExperimentConfig& cfg);

// HypothesisViolation naming the failed inequality.
HoloClass gen_family(const BundleSpec& spec, const FamilyParams& params);
// Family, explicit coefficients, or a seeded random class, in that order.
HoloClass class_of(const ExperimentConfig& cfg);

struct LambdaOutcome {
    double lambda = 0.0;
    bool converged = false;
    double residual_sup = 0.0;
    double conservation_defect = 0.0;
    double offset = 0.0;
    double max_u = 0.0;
    std::vector<cplx> b;  // empty when the solve failed
    int stratum = 0;
    int div_eta = 0;
    double margin = 0.0;
    bool boundary = false;
    double off_pattern = 0.0;  // symmetry audit only
    std::string failure;
};

struct RunRecord {
    std::string experiment;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::vector<LambdaOutcome> points;  // sorted by lambda
    std::vector<RadialSample> shooting;
    nlohmann::json summary = nlohmann::json::object();
    std::vector<std::string> failed_checks;
    double wall_seconds = 0.0;

    bool passed() const { return failed_checks.empty(); }
};

RunRecord run_existence_sweep(const ExperimentConfig& cfg);
RunRecord run_symmetry_audit(const ExperimentConfig& cfg);
RunRecord run_radial_nonexistence(const ExperimentConfig& cfg);

// Header lambda,converged,residual_sup,offset,b_1_re,b_1_im,...,stratum,margin.
std::string sweep_csv(const RunRecord& rec, int k);
// Long format: s,mismatch,error.
std::string shooting_csv(const RunRecord& rec);
nlohmann::json record_json(const ExperimentConfig& cfg, const RunRecord& rec);
// Writes <prefix>.json and the CSVs that apply; returns the paths written.
std::vector<std::string> write_artifacts(const ExperimentConfig& cfg, const RunRecord& rec);

}  // namespace curvlab
