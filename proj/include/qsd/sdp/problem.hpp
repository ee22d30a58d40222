// Solver-neutral standard form for the detection SDPs: Hermitian variable
// blocks and free scalars, a linear objective, trace-pairing equality rows,
// and PSD constraints on affine Hermitian expressions of the variables.
#pragma once

#include <string>
#include <vector>

#include "qsd/types.hpp"

namespace qsd::sdp {

// Hermitian variable block of dimension dim (dim^2 real coordinates).
struct VarBlock {
    std::string name;
    int dim = 0;
};

// coeff * sum_k ops[k] X_b ops[k]^*  (ops empty means coeff * X_b).
struct BlockTerm {
    int block = -1;
    double coeff = 1.0;
    std::vector<Mat> ops;
};

// t_s * coeff with Hermitian coeff.
struct ScalarTerm {
    int scalar = -1;
    Mat coeff;
};

// Affine Hermitian expression  constant + sum BlockTerm + sum ScalarTerm,
// constrained PSD by the solver (each gets a log-det barrier term).
struct PsdConstraint {
    std::string name;
    int dim = 0;
    Mat constant;
    std::vector<BlockTerm> block_terms;
    std::vector<ScalarTerm> scalar_terms;
    bool is_slack = false;   // operator-inequality slack (reporting only)
};

// sum_b Tr(A_b X_b) + sum_s c_s t_s  (= rhs for equality rows).
struct LinearFunc {
    std::vector<std::pair<int, Mat>> matrix_terms;     // (block, Hermitian A)
    std::vector<std::pair<int, double>> scalar_terms;  // (scalar, c)
    double rhs = 0.0;
};

enum class Sense { Minimize, Maximize };

struct SdpProblem {
    std::vector<VarBlock> blocks;
    std::vector<std::string> scalars;
    std::vector<PsdConstraint> psd;
    std::vector<LinearFunc> equalities;
    LinearFunc objective;
    Sense sense = Sense::Maximize;
    RVec start;          // strictly feasible start in packed coordinates

    int add_block(const std::string& name, int dim);
    int add_scalar(const std::string& name);

    // Expands an operator equality  sum coeff_b X_b (conjugated) + sum t_s C_s = RHS
    // into dim^2 scalar rows over the real Hermitian coordinate basis.
    void add_operator_equality(const std::vector<BlockTerm>& terms,
                               const std::vector<ScalarTerm>& sterms, const Mat& rhs);

    // Packed coordinate layout: block coords in declaration order, then scalars.
    int num_coords() const;
    int block_offset(int block) const;
    int scalar_offset(int scalar) const;

    Mat block_value(const RVec& v, int block) const;
    double scalar_value(const RVec& v, int scalar) const;
    void set_block(RVec& v, int block, const Mat& value) const;
    void set_scalar(RVec& v, int scalar, double value) const;

    Mat psd_value(const RVec& v, int constraint) const;

    // Objective / equality row as a dense coordinate vector.
    RVec func_coords(const LinearFunc& f) const;
};

}  // namespace qsd::sdp
