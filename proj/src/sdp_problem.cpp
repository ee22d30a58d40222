#include "qsd/sdp/problem.hpp"

#include "qsd/linalg.hpp"

namespace qsd::sdp {

int SdpProblem::add_block(const std::string& name, int dim) {
    blocks.push_back({name, dim});
    return static_cast<int>(blocks.size()) - 1;
}

int SdpProblem::add_scalar(const std::string& name) {
    scalars.push_back(name);
    return static_cast<int>(scalars.size()) - 1;
}

int SdpProblem::num_coords() const {
    int n = 0;
    for (const auto& b : blocks) n += b.dim * b.dim;
    return n + static_cast<int>(scalars.size());
}

int SdpProblem::block_offset(int block) const {
    int off = 0;
    for (int b = 0; b < block; ++b) off += blocks[static_cast<size_t>(b)].dim * blocks[static_cast<size_t>(b)].dim;
    return off;
}

int SdpProblem::scalar_offset(int scalar) const {
    int off = 0;
    for (const auto& b : blocks) off += b.dim * b.dim;
    return off + scalar;
}

Mat SdpProblem::block_value(const RVec& v, int block) const {
    const int d = blocks[static_cast<size_t>(block)].dim;
    return coords_to_herm(v.segment(block_offset(block), d * d), d);
}

double SdpProblem::scalar_value(const RVec& v, int scalar) const {
    return v(scalar_offset(scalar));
}

void SdpProblem::set_block(RVec& v, int block, const Mat& value) const {
    const int d = blocks[static_cast<size_t>(block)].dim;
    v.segment(block_offset(block), d * d) = herm_to_coords(value);
}

void SdpProblem::set_scalar(RVec& v, int scalar, double value) const {
    v(scalar_offset(scalar)) = value;
}

Mat SdpProblem::psd_value(const RVec& v, int constraint) const {
    const PsdConstraint& c = psd[static_cast<size_t>(constraint)];
    Mat s = c.constant.rows() > 0 ? c.constant : Mat::Zero(c.dim, c.dim);
    for (const auto& bt : c.block_terms) {
        Mat x = block_value(v, bt.block);
        if (bt.ops.empty()) {
            s += bt.coeff * x;
        } else {
            for (const Mat& u : bt.ops) s += bt.coeff * (u * x * u.adjoint());
        }
    }
    for (const auto& st : c.scalar_terms) s += scalar_value(v, st.scalar) * st.coeff;
    return s;
}

void SdpProblem::add_operator_equality(const std::vector<BlockTerm>& terms,
                                       const std::vector<ScalarTerm>& sterms, const Mat& rhs) {
    const int d = static_cast<int>(rhs.rows());
    RVec rhs_coords = herm_to_coords(rhs);
    // Row j pairs basis element B_j with each term. For a conjugation term
    // coeff * sum_k U_k X U_k* the pairing Tr(B_j * coeff * sum U_k X U_k*)
    // equals Tr((coeff * sum U_k* B_j U_k) X), so the adjoint map lands on X.
    for (int j = 0; j < d * d; ++j) {
        RVec e = RVec::Zero(d * d);
        e(j) = 1.0;
        Mat bj = coords_to_herm(e, d);
        LinearFunc row;
        for (const auto& bt : terms) {
            Mat a;
            if (bt.ops.empty()) {
                a = bt.coeff * bj;
            } else {
                a = Mat::Zero(blocks[static_cast<size_t>(bt.block)].dim,
                              blocks[static_cast<size_t>(bt.block)].dim);
                for (const Mat& u : bt.ops) a += bt.coeff * (u.adjoint() * bj * u);
            }
            row.matrix_terms.emplace_back(bt.block, std::move(a));
        }
        for (const auto& st : sterms)
            row.scalar_terms.emplace_back(st.scalar, herm_inner(bj, st.coeff));
        row.rhs = rhs_coords(j);
        equalities.push_back(std::move(row));
    }
}

RVec SdpProblem::func_coords(const LinearFunc& f) const {
    RVec c = RVec::Zero(num_coords());
    for (const auto& [b, a] : f.matrix_terms)
        c.segment(block_offset(b), blocks[static_cast<size_t>(b)].dim * blocks[static_cast<size_t>(b)].dim) +=
            herm_to_coords(a);
    for (const auto& [s, w] : f.scalar_terms) c(scalar_offset(s)) += w;
    return c;
}

}  // namespace qsd::sdp
