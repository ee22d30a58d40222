#include "qsd/oracle.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "qsd/linalg.hpp"

namespace qsd {

namespace {

using Eigen::Matrix2cd;
using Eigen::Matrix2d;
using Eigen::Vector2cd;
using Eigen::Vector2d;

constexpr double kFeasTol = 1e-9;

void require_beta(double beta) {
    if (!(beta >= 0.0) || !(beta < 1.0))
        throw Error(ErrorCode::BetaOutOfRange, "beta must lie in [0, 1), got " + std::to_string(beta));
}

double lambda_min2(const Matrix2cd& h) {
    const double mid = 0.5 * (h(0, 0).real() - h(1, 1).real());
    const double off = std::abs(h(0, 1));
    return 0.5 * (h(0, 0).real() + h(1, 1).real()) - std::sqrt(mid * mid + off * off);
}

double lambda_min2(const Matrix2d& h) {
    const double mid = 0.5 * (h(0, 0) - h(1, 1));
    return 0.5 * (h(0, 0) + h(1, 1)) - std::sqrt(mid * mid + h(0, 1) * h(1, 0));
}

struct QuadRoots {
    int count = 0;
    double r[2] = {0.0, 0.0};
};

QuadRoots solve_quadratic(double a2, double a1, double a0) {
    QuadRoots out;
    const double scale = std::abs(a1) + std::abs(a0) + 1.0;
    if (std::abs(a2) < 1e-14 * scale) {
        if (std::abs(a1) > 1e-14 * (std::abs(a0) + 1.0)) out.r[out.count++] = -a0 / a1;
        return out;
    }
    const double disc = a1 * a1 - 4.0 * a2 * a0;
    if (disc < 0.0) return out;
    const double sq = std::sqrt(disc);
    out.r[out.count++] = (-a1 - sq) / (2.0 * a2);
    out.r[out.count++] = (-a1 + sq) / (2.0 * a2);
    return out;
}

// det polarization for 2x2: det(A) = D(A, A), D bilinear.
double det_form(const Matrix2d& a, const Matrix2d& b) {
    return 0.5 * (a.trace() * b.trace() - (a * b).trace());
}

struct GridDir {
    Matrix2cd P;
    double a = 0.0;      // <v| Delta |v>
    double c[3] = {0.0, 0.0, 0.0};  // p_i <v| rho_i |v>
};

struct GridBest {
    double pd = -std::numeric_limits<double>::infinity();
    std::vector<Matrix2cd> ops;  // conclusive operators
};

void consider(GridBest& best, double pd, std::initializer_list<Matrix2cd> ops) {
    if (pd <= best.pd) return;
    best.pd = pd;
    best.ops.assign(ops);
}

std::vector<GridDir> sphere_directions(const StateEnsemble& ens, int res) {
    std::vector<GridDir> dirs;
    dirs.reserve(static_cast<size_t>(res) * res);
    for (int j = 0; j < res; ++j) {
        const double theta = std::numbers::pi * j / (res - 1);
        for (int k = 0; k < res; ++k) {
            const double phi = 2.0 * std::numbers::pi * k / res;
            Vector2cd v;
            v << std::cos(0.5 * theta), std::polar(std::sin(0.5 * theta), phi);
            GridDir d;
            d.P = v * v.adjoint();
            d.a = (v.adjoint() * ens.Delta * v)(0).real();
            for (int i = 0; i < ens.m; ++i)
                d.c[i] = ens.states[static_cast<size_t>(i)].prior *
                         (v.adjoint() * ens.states[static_cast<size_t>(i)].rho * v)(0).real();
            dirs.push_back(std::move(d));
        }
    }
    return dirs;
}

// m = 1: the rate equality fixes the single weight.
void grid_m1(const StateEnsemble& ens, double beta, int res, GridBest& best, std::uint64_t& evals) {
    const std::vector<GridDir> dirs = sphere_directions(ens, res);
    const Matrix2cd eye = Matrix2cd::Identity();
    for (const GridDir& d : dirs) {
        const double t = (1.0 - beta) / d.a;
        ++evals;
        if (t < -kFeasTol) continue;
        Matrix2cd pi0 = eye - t * d.P;
        if (lambda_min2(pi0) < -kFeasTol) continue;
        consider(best, t * d.c[0], {Matrix2cd(t * d.P)});
    }
}

// m = 2: at fixed directions the weights live on the segment cut out of the
// rate line by t >= 0 and Pi_0 >= 0; a linear objective peaks at an endpoint,
// so only axis crossings and det Pi_0 = 0 roots need evaluation.
void grid_m2(const StateEnsemble& ens, double beta, int res, GridBest& best, std::uint64_t& evals) {
    const std::vector<GridDir> dirs = sphere_directions(ens, res);
    const Matrix2cd eye = Matrix2cd::Identity();
    for (const GridDir& d1 : dirs) {
        const double u1 = (1.0 - beta) / d1.a;
        const Matrix2cd m0 = eye - u1 * d1.P;
        for (const GridDir& d2 : dirs) {
            // t(s) = (u1 + s a2, -s a1) stays on the rate line.
            const Matrix2cd nmat = d1.a * d2.P - d2.a * d1.P;
            const double qa = nmat(0, 0).real() * nmat(1, 1).real() - std::norm(nmat(0, 1));
            const double qb = m0(0, 0).real() * nmat(1, 1).real() + nmat(0, 0).real() * m0(1, 1).real() -
                              2.0 * (m0(0, 1) * std::conj(nmat(0, 1))).real();
            const double qc = m0(0, 0).real() * m0(1, 1).real() - std::norm(m0(0, 1));

            double cand[4];
            int nc = 0;
            cand[nc++] = 0.0;
            cand[nc++] = -u1 / d2.a;
            const QuadRoots roots = solve_quadratic(qa, qb, qc);
            for (int k = 0; k < roots.count; ++k) cand[nc++] = roots.r[k];

            for (int k = 0; k < nc; ++k) {
                const double s = cand[k];
                const double t1 = u1 + s * d2.a;
                const double t2 = -s * d1.a;
                ++evals;
                if (t1 < -kFeasTol || t2 < -kFeasTol) continue;
                Matrix2cd pi0 = m0 + s * nmat;
                if (lambda_min2(pi0) < -kFeasTol) continue;
                consider(best, t1 * d1.c[0] + t2 * d2.c[1],
                         {Matrix2cd(t1 * d1.P), Matrix2cd(t2 * d2.P)});
            }
        }
    }
}

struct RealDir {
    Matrix2d P;
    double a = 0.0;
    double c[3] = {0.0, 0.0, 0.0};
};

// m = 3, real ensembles: real directions over a half turn, the rate equality
// eliminates t_3, and the planar region {t >= 0, Pi_0 >= 0} is bounded by
// four lines and the conic det Pi_0 = 0. Candidates: line-pair vertices,
// line-conic roots, and conic tangency points of the reduced objective.
void grid_m3(const StateEnsemble& ens, double beta, int res, GridBest& best, std::uint64_t& evals) {
    std::vector<RealDir> dirs;
    dirs.reserve(static_cast<size_t>(res));
    const Eigen::MatrixXd delta = ens.Delta.real();
    std::vector<Eigen::MatrixXd> rho(static_cast<size_t>(ens.m));
    for (int i = 0; i < ens.m; ++i) rho[static_cast<size_t>(i)] = ens.states[static_cast<size_t>(i)].rho.real();
    for (int j = 0; j < res; ++j) {
        const double theta = std::numbers::pi * j / res;
        Vector2d v(std::cos(theta), std::sin(theta));
        RealDir d;
        d.P = v * v.transpose();
        d.a = v.dot(delta * v);
        for (int i = 0; i < ens.m; ++i)
            d.c[i] = ens.states[static_cast<size_t>(i)].prior * v.dot(rho[static_cast<size_t>(i)] * v);
        dirs.push_back(std::move(d));
    }

    const Matrix2d eye = Matrix2d::Identity();
    for (const RealDir& d1 : dirs) {
        for (const RealDir& d2 : dirs) {
            for (const RealDir& d3 : dirs) {
                const double a1 = d1.a, a2 = d2.a, a3 = d3.a;
                const Matrix2d g0 = eye - ((1.0 - beta) / a3) * d3.P;
                const Matrix2d g1 = (a1 / a3) * d3.P - d1.P;
                const Matrix2d g2 = (a2 / a3) * d3.P - d2.P;

                Matrix2d qf;  // det Pi_0 = t' qf t + bf . t + c0
                qf << det_form(g1, g1), det_form(g1, g2), det_form(g1, g2), det_form(g2, g2);
                const Vector2d bf(2.0 * det_form(g0, g1), 2.0 * det_form(g0, g2));
                const double c0 = det_form(g0, g0);
                // Reduced objective gradient after eliminating t_3.
                const Vector2d cr(d1.c[0] - d3.c[2] * a1 / a3, d2.c[1] - d3.c[2] * a2 / a3);

                Vector2d normals[4];
                double rhs[4];
                int nl = 0;
                normals[nl] = Vector2d(1.0, 0.0); rhs[nl++] = 0.0;
                normals[nl] = Vector2d(0.0, 1.0); rhs[nl++] = 0.0;
                normals[nl] = Vector2d(a1, a2); rhs[nl++] = 1.0 - beta;
                const Vector2d trg(g1.trace(), g2.trace());
                if (trg.norm() > 1e-12) { normals[nl] = trg; rhs[nl++] = -g0.trace(); }

                Vector2d cand[24];
                int nc = 0;
                for (int p = 0; p < nl; ++p)
                    for (int q = p + 1; q < nl; ++q) {
                        const double cross = normals[p].x() * normals[q].y() - normals[p].y() * normals[q].x();
                        if (std::abs(cross) < 1e-12) continue;
                        cand[nc++] = Vector2d(rhs[p] * normals[q].y() - rhs[q] * normals[p].y(),
                                              normals[p].x() * rhs[q] - normals[q].x() * rhs[p]) / cross;
                    }
                for (int p = 0; p < nl; ++p) {
                    const Vector2d& nrm = normals[p];
                    Vector2d u = std::abs(nrm.x()) >= std::abs(nrm.y()) ? Vector2d(rhs[p] / nrm.x(), 0.0)
                                                                        : Vector2d(0.0, rhs[p] / nrm.y());
                    const Vector2d w(-nrm.y(), nrm.x());
                    const QuadRoots roots = solve_quadratic(w.dot(qf * w), 2.0 * u.dot(qf * w) + bf.dot(w),
                                                            u.dot(qf * u) + bf.dot(u) + c0);
                    for (int k = 0; k < roots.count; ++k) cand[nc++] = u + roots.r[k] * w;
                }
                const double detq = qf(0, 0) * qf(1, 1) - qf(0, 1) * qf(1, 0);
                if (std::abs(detq) > 1e-13 && cr.norm() > 1e-14) {
                    Matrix2d qinv;
                    qinv << qf(1, 1), -qf(0, 1), -qf(1, 0), qf(0, 0);
                    qinv /= detq;
                    const Vector2d t0 = -0.5 * (qinv * bf);
                    const Vector2d td = 0.5 * (qinv * cr);
                    const QuadRoots roots =
                        solve_quadratic(td.dot(qf * td), 2.0 * t0.dot(qf * td) + bf.dot(td),
                                        t0.dot(qf * t0) + bf.dot(t0) + c0);
                    for (int k = 0; k < roots.count; ++k) cand[nc++] = t0 + roots.r[k] * td;
                }

                for (int k = 0; k < nc; ++k) {
                    const double t1 = cand[k].x(), t2 = cand[k].y();
                    const double t3 = ((1.0 - beta) - t1 * a1 - t2 * a2) / a3;
                    ++evals;
                    if (t1 < -kFeasTol || t2 < -kFeasTol || t3 < -kFeasTol) continue;
                    Matrix2d pi0 = g0 + t1 * g1 + t2 * g2;
                    if (lambda_min2(pi0) < -kFeasTol) continue;
                    consider(best, t1 * d1.c[0] + t2 * d2.c[1] + t3 * d3.c[2],
                             {Matrix2cd(t1 * d1.P.cast<cxd>()), Matrix2cd(t2 * d2.P.cast<cxd>()),
                              Matrix2cd(t3 * d3.P.cast<cxd>())});
                }
            }
        }
    }
}

}  // namespace

OracleResult grid_search(const StateEnsemble& ens, double beta, int resolution) {
    require_beta(beta);
    if (ens.n != 2)
        throw Error(ErrorCode::UnsupportedSize, "grid oracle handles n = 2 only, got n = " + std::to_string(ens.n));
    if (ens.m > 3)
        throw Error(ErrorCode::UnsupportedSize, "grid oracle handles m <= 3, got m = " + std::to_string(ens.m));
    if (resolution < 2)
        throw Error(ErrorCode::UnsupportedSize, "grid resolution must be >= 2");
    for (const State& st : ens.states)
        if (st.factor.cols() != 1)
            throw Error(ErrorCode::UnsupportedSize, "grid oracle handles pure states only");
    if (ens.m == 3) {
        double im = ens.Delta.imag().cwiseAbs().maxCoeff();
        for (const State& st : ens.states) im = std::max(im, st.rho.imag().cwiseAbs().maxCoeff());
        if (im > 1e-12)
            throw Error(ErrorCode::UnsupportedSize, "m = 3 grid search is restricted to real ensembles");
    }

    GridBest best;
    std::uint64_t evals = 0;
    if (ens.m == 1)
        grid_m1(ens, beta, resolution, best, evals);
    else if (ens.m == 2)
        grid_m2(ens, beta, resolution, best, evals);
    else
        grid_m3(ens, beta, resolution, best, evals);
    if (!std::isfinite(best.pd))
        throw Error(ErrorCode::NumericalFailure, "no feasible grid cell at beta = " + std::to_string(beta));

    OracleResult out;
    out.best_pd = best.pd;
    out.resolution = resolution;
    out.evaluations = evals;
    out.best.n = 2;
    out.best.m = ens.m;
    Mat acc = Mat::Zero(2, 2);
    out.best.ops.push_back(Mat());
    for (const Matrix2cd& op : best.ops) {
        out.best.ops.push_back(hermitian_part(Mat(op)));
        acc += out.best.ops.back();
    }
    out.best.ops[0] = hermitian_part(Mat::Identity(2, 2) - acc);
    return out;
}

namespace {

double ascent_pd(const StateEnsemble& ens, const std::vector<Mat>& x) {
    double pd = 0.0;
    for (int i = 0; i < ens.m; ++i)
        pd += ens.states[static_cast<size_t>(i)].prior *
              herm_inner(ens.states[static_cast<size_t>(i)].rho, x[static_cast<size_t>(i)]);
    return pd;
}

void project_psd_blocks(std::vector<Mat>& x) {
    for (Mat& b : x) {
        Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(b));
        b = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() *
            es.eigenvectors().adjoint();
    }
}

void project_sum_cap(std::vector<Mat>& x) {
    Mat s = Mat::Zero(x[0].rows(), x[0].cols());
    for (const Mat& b : x) s += b;
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(s));
    Mat excess = es.eigenvectors() * (es.eigenvalues().array() - 1.0).max(0.0).matrix().asDiagonal() *
                 es.eigenvectors().adjoint();
    for (Mat& b : x) b -= excess / static_cast<double>(x.size());
}

void project_rate(const StateEnsemble& ens, double beta, std::vector<Mat>& x) {
    double val = 0.0;
    for (const Mat& b : x) val += herm_inner(ens.Delta, b);
    const double corr = ((1.0 - beta) - val) / (static_cast<double>(x.size()) * ens.Delta.squaredNorm());
    for (Mat& b : x) b += corr * ens.Delta;
}

double feasibility_residual(const StateEnsemble& ens, double beta, const std::vector<Mat>& x) {
    double res = 0.0;
    Mat s = Mat::Zero(ens.n, ens.n);
    double rate = 0.0;
    for (const Mat& b : x) {
        res = std::max(res, -min_eigenvalue(hermitian_part(b)));
        s += b;
        rate += herm_inner(ens.Delta, b);
    }
    res = std::max(res, max_eigenvalue(hermitian_part(s)) - 1.0);
    res = std::max(res, std::abs(rate - (1.0 - beta)));
    return res;
}

// Dykstra alternating projections onto {Pi_i >= 0} ∩ {sum <= I} ∩ rate plane.
double dykstra_project(const StateEnsemble& ens, double beta, std::vector<Mat>& x, int max_cycles,
                       double target) {
    const size_t m = x.size();
    std::vector<std::vector<Mat>> corr(3, std::vector<Mat>(m, Mat::Zero(ens.n, ens.n)));
    double res = std::numeric_limits<double>::infinity();
    for (int cycle = 0; cycle < max_cycles; ++cycle) {
        for (int set = 0; set < 3; ++set) {
            std::vector<Mat> y(m);
            for (size_t i = 0; i < m; ++i) y[i] = x[i] + corr[static_cast<size_t>(set)][i];
            std::vector<Mat> z = y;
            if (set == 0)
                project_psd_blocks(z);
            else if (set == 1)
                project_sum_cap(z);
            else
                project_rate(ens, beta, z);
            for (size_t i = 0; i < m; ++i) {
                corr[static_cast<size_t>(set)][i] = y[i] - z[i];
                x[i] = z[i];
            }
        }
        res = feasibility_residual(ens, beta, x);
        if (res <= target) break;
    }
    return res;
}

}  // namespace

OracleResult random_restart_ascent(const StateEnsemble& ens, double beta, int restarts,
                                   std::uint64_t seed) {
    require_beta(beta);
    if (ens.n > 3 || ens.m > 4)
        throw Error(ErrorCode::UnsupportedSize, "ascent oracle handles n <= 3, m <= 4");
    if (restarts < 1) restarts = 1;
    const int n = ens.n;
    const int m = ens.m;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    constexpr double kPhases[] = {0.5, 0.1, 0.02, 4e-3, 8e-4, 1.6e-4, 3.2e-5, 6.4e-6};
    constexpr int kStepsPerPhase = 40;

    double best_pd = -std::numeric_limits<double>::infinity();
    std::vector<Mat> best_x;
    std::uint64_t evals = 0;

    for (int rs = 0; rs < restarts; ++rs) {
        std::vector<Mat> x(static_cast<size_t>(m));
        if (rs == 0) {
            for (Mat& b : x) b = ((1.0 - beta) / m) * Mat::Identity(n, n);
        } else {
            double val = 0.0;
            for (Mat& b : x) {
                Mat g(n, n);
                for (int r = 0; r < n; ++r)
                    for (int c = 0; c < n; ++c) g(r, c) = cxd(gauss(rng), gauss(rng));
                b = g * g.adjoint();
                val += herm_inner(ens.Delta, b);
            }
            for (Mat& b : x) b *= (1.0 - beta) / val;
            dykstra_project(ens, beta, x, 120, 1e-11);
        }

        for (double eta : kPhases) {
            for (int step = 0; step < kStepsPerPhase; ++step) {
                for (int i = 0; i < m; ++i)
                    x[static_cast<size_t>(i)] += eta * ens.states[static_cast<size_t>(i)].prior *
                                                 ens.states[static_cast<size_t>(i)].rho;
                dykstra_project(ens, beta, x, 60, 1e-11);
                const double pd = ascent_pd(ens, x);
                ++evals;
                if (pd > best_pd) {
                    best_pd = pd;
                    best_x = x;
                }
            }
        }
    }

    dykstra_project(ens, beta, best_x, 300, 1e-13);
    OracleResult out;
    out.best_pd = ascent_pd(ens, best_x);
    out.evaluations = evals;
    out.best.n = n;
    out.best.m = m;
    out.best.ops.assign(1, Mat());
    Mat acc = Mat::Zero(n, n);
    for (const Mat& b : best_x) {
        out.best.ops.push_back(hermitian_part(b));
        acc += out.best.ops.back();
    }
    out.best.ops[0] = hermitian_part(Mat::Identity(n, n) - acc);
    return out;
}

}  // namespace qsd
