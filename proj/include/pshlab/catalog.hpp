#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pshlab/grid.hpp"

namespace pshlab {

/// Value, complex gradient d/dz_j and mixed Hessian d^2/dz_j dz_k-bar of a
/// real function at one point. Fixed capacity 2 (n <= 2), no heap per call.
template <class Scalar = double>
struct Derivs {
    Scalar value = Scalar(0);
    Eigen::Matrix<Complex<Scalar>, 2, 1> grad = Eigen::Matrix<Complex<Scalar>, 2, 1>::Zero();
    Eigen::Matrix<Complex<Scalar>, 2, 2> hess = Eigen::Matrix<Complex<Scalar>, 2, 2>::Zero();
    int n = 1;

    void reset(int dim) {
        n = dim;
        value = Scalar(0);
        grad.setZero();
        hess.setZero();
    }
};

/// Convex non-decreasing reparametrization chi with evaluable chi' and chi''.
template <class Scalar = double>
class ChiWeight {
public:
    enum class Kind { Identity, PhiAlpha, ExpFamily, Cutoff, Table };

    static ChiWeight identity() { return ChiWeight(Kind::Identity); }

    /// Phi_alpha(t) = -(-t)^alpha on t < 0, 0 < alpha < 1.
    static ChiWeight phi_alpha(Scalar alpha) {
        if (!(alpha > 0 && alpha < 1)) throw InvalidArgument("phi_alpha: need 0 < alpha < 1");
        ChiWeight c(Kind::PhiAlpha);
        c.alpha_ = alpha;
        return c;
    }

    /// chi_m(t) = -m(1 - e^{t/m}): bounded, convex, non-decreasing, and
    /// decreasing pointwise to the identity as m grows.
    static ChiWeight exp_family(Scalar m) {
        if (!(m > 0)) throw InvalidArgument("exp_family: need m > 0");
        ChiWeight c(Kind::ExpFamily);
        c.m_ = m;
        return c;
    }

    /// chi(t) = max(t, floor), smoothed at scale eps when eps > 0.
    static ChiWeight cutoff(Scalar floor_level, Scalar eps = Scalar(0)) {
        if (eps < 0) throw InvalidArgument("cutoff: smoothing must be >= 0");
        ChiWeight c(Kind::Cutoff);
        c.floor_ = floor_level;
        c.eps_ = eps;
        return c;
    }

    /// Piecewise-linear chi from a table of (t, chi(t)) pairs; slopes must be
    /// nonnegative and nondecreasing. Extended by the edge slopes outside.
    static ChiWeight table(std::vector<std::pair<Scalar, Scalar>> pts) {
        if (pts.size() < 2) throw InvalidArgument("table: need at least 2 points");
        std::sort(pts.begin(), pts.end());
        Scalar prev_slope = -std::numeric_limits<Scalar>::infinity();
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const Scalar dt = pts[i + 1].first - pts[i].first;
            if (!(dt > 0)) throw InvalidArgument("table: duplicate abscissa");
            const Scalar s = (pts[i + 1].second - pts[i].second) / dt;
            if (s < -Scalar(1e-14)) throw InvalidArgument("table: decreasing segment");
            if (s < prev_slope - Scalar(1e-14)) throw InvalidArgument("table: non-convex table");
            prev_slope = std::max(prev_slope, s);
        }
        ChiWeight c(Kind::Table);
        c.table_ = std::move(pts);
        return c;
    }

    Kind kind() const { return kind_; }
    Scalar alpha() const { return alpha_; }
    Scalar m() const { return m_; }

    /// True if chi is only defined on (-inf, 0).
    bool needs_negative() const { return kind_ == Kind::PhiAlpha; }

    bool bounded_below() const {
        switch (kind_) {
            case Kind::ExpFamily: return true;
            case Kind::Cutoff: return true;
            case Kind::Table: return segment_slope(0) == Scalar(0);
            default: return false;
        }
    }

    Scalar lower_bound() const {
        switch (kind_) {
            case Kind::ExpFamily: return -m_;
            case Kind::Cutoff: return floor_;
            case Kind::Table: return table_.front().second;
            default: return -std::numeric_limits<Scalar>::infinity();
        }
    }

    /// Kink abscissas where chi'' is a jump (hard cutoff level, table knots).
    std::vector<Scalar> kinks() const {
        std::vector<Scalar> k;
        if (kind_ == Kind::Cutoff && eps_ == Scalar(0)) k.push_back(floor_);
        if (kind_ == Kind::Table)
            for (const auto& p : table_) k.push_back(p.first);
        return k;
    }

    Scalar chi(Scalar t) const {
        switch (kind_) {
            case Kind::Identity: return t;
            case Kind::PhiAlpha: return -std::pow(-t, alpha_);
            case Kind::ExpFamily: return -m_ * (Scalar(1) - std::exp(t / m_));
            case Kind::Cutoff: {
                if (eps_ == Scalar(0)) return std::max(t, floor_);
                const Scalar d = t - floor_;
                return ((t + floor_) + std::sqrt(d * d + eps_ * eps_)) / Scalar(2);
            }
            case Kind::Table: {
                const auto [i, s] = locate(t);
                return table_[i].second + s * (t - table_[i].first);
            }
        }
        return t;
    }

    Scalar chi1(Scalar t) const {
        switch (kind_) {
            case Kind::Identity: return Scalar(1);
            case Kind::PhiAlpha: return alpha_ * std::pow(-t, alpha_ - Scalar(1));
            case Kind::ExpFamily: return std::exp(t / m_);
            case Kind::Cutoff: {
                if (eps_ == Scalar(0)) return t > floor_ ? Scalar(1) : Scalar(0);
                const Scalar d = t - floor_;
                return (Scalar(1) + d / std::sqrt(d * d + eps_ * eps_)) / Scalar(2);
            }
            case Kind::Table: return locate(t).second;
        }
        return Scalar(1);
    }

    Scalar chi2(Scalar t) const {
        switch (kind_) {
            case Kind::Identity: return Scalar(0);
            case Kind::PhiAlpha:
                return alpha_ * (Scalar(1) - alpha_) * std::pow(-t, alpha_ - Scalar(2));
            case Kind::ExpFamily: return std::exp(t / m_) / m_;
            case Kind::Cutoff: {
                if (eps_ == Scalar(0)) return Scalar(0);
                const Scalar d2 = (t - floor_) * (t - floor_) + eps_ * eps_;
                return eps_ * eps_ / (Scalar(2) * d2 * std::sqrt(d2));
            }
            case Kind::Table: return Scalar(0);
        }
        return Scalar(0);
    }

    std::string describe() const {
        std::ostringstream os;
        switch (kind_) {
            case Kind::Identity: os << "identity"; break;
            case Kind::PhiAlpha: os << "phi-alpha(alpha=" << alpha_ << ")"; break;
            case Kind::ExpFamily: os << "exp-family(m=" << m_ << ")"; break;
            case Kind::Cutoff: os << "cutoff(level=" << floor_ << ",eps=" << eps_ << ")"; break;
            case Kind::Table: os << "table(" << table_.size() << " pts)"; break;
        }
        return os.str();
    }

private:
    explicit ChiWeight(Kind k) : kind_(k) {}

    Scalar segment_slope(std::size_t i) const {
        return (table_[i + 1].second - table_[i].second) / (table_[i + 1].first - table_[i].first);
    }

    std::pair<std::size_t, Scalar> locate(Scalar t) const {
        if (t <= table_.front().first) return {0, segment_slope(0)};
        if (t >= table_.back().first) {
            const std::size_t i = table_.size() - 2;
            return {i, segment_slope(i)};
        }
        std::size_t lo = 0, hi = table_.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (table_[mid].first <= t ? lo : hi) = mid;
        }
        return {lo, segment_slope(lo)};
    }

    Kind kind_;
    Scalar alpha_ = Scalar(0.5);
    Scalar m_ = Scalar(1);
    Scalar floor_ = Scalar(-1);
    Scalar eps_ = Scalar(0);
    std::vector<std::pair<Scalar, Scalar>> table_;
};

// ---------------------------------------------------------------------------
// Expression tree
// ---------------------------------------------------------------------------

template <class Scalar>
class PshNode;

template <class Scalar>
using NodePtr = std::shared_ptr<const PshNode<Scalar>>;

template <class Scalar = double>
class PshNode {
public:
    virtual ~PshNode() = default;

    /// Smallest complex dimension containing every coordinate the node reads.
    virtual int dim() const = 0;

    /// True when closed-form first/second complex derivatives exist
    /// (possibly piecewise, away from kinks).
    virtual bool analytic() const = 0;

    virtual bool pluriharmonic() const { return false; }

    /// Value; quiet NaN off the natural domain or on the singular set.
    virtual Scalar eval(const PointX<Scalar>& p) const = 0;

    /// Analytic derivatives; only called when analytic() holds.
    virtual void derivs(const PointX<Scalar>& p, Derivs<Scalar>& out) const = 0;

    /// Approximate distance from p to the nearest singular set or derivative
    /// kink (infinite when none). Conservative; used to build validity masks.
    virtual Scalar clearance(const PointX<Scalar>&) const {
        return std::numeric_limits<Scalar>::infinity();
    }

    /// Throws when the natural domain does not contain the box.
    virtual void check_box(std::span<const Scalar> /*lo*/, std::span<const Scalar> /*hi*/) const {}

    virtual std::string describe() const = 0;
};

namespace nodes {

template <class Scalar>
class Const final : public PshNode<Scalar> {
public:
    explicit Const(Scalar c) : c_(c) {}
    int dim() const override { return 1; }
    bool analytic() const override { return true; }
    bool pluriharmonic() const override { return true; }
    Scalar eval(const PointX<Scalar>&) const override { return c_; }
    void derivs(const PointX<Scalar>&, Derivs<Scalar>& out) const override { out.value = c_; }
    std::string describe() const override {
        std::ostringstream os;
        os << c_;
        return os.str();
    }

private:
    Scalar c_;
};

template <class Scalar>
class AbsSq final : public PshNode<Scalar> {
public:
    AbsSq(int j, Complex<Scalar> c = Complex<Scalar>(0, 0)) : j_(j), c_(c) {}
    int dim() const override { return j_ + 1; }
    bool analytic() const override { return true; }
    Scalar eval(const PointX<Scalar>& p) const override { return std::norm(coord(p, j_) - c_); }
    void derivs(const PointX<Scalar>& p, Derivs<Scalar>& out) const override {
        const Complex<Scalar> zeta = coord(p, j_) - c_;
        out.value = std::norm(zeta);
        out.grad[j_] = std::conj(zeta);
        out.hess(j_, j_) = Complex<Scalar>(1, 0);
    }
    std::string describe() const override {
        std::ostringstream os;
        os << "|z" << j_ + 1 << (c_ == Complex<Scalar>(0, 0) ? "" : " - c") << "|^2";
        return os.str();
    }

private:
    int j_;
    Complex<Scalar> c_;
};

template <class Scalar>
class LogAbs final : public PshNode<Scalar> {
public:
    LogAbs(int j, Complex<Scalar> c = Complex<Scalar>(0, 0)) : j_(j), c_(c) {}
    int dim() const override { return j_ + 1; }
    bool analytic() const override { return true; }
    bool pluriharmonic() const override { return true; }
    Scalar eval(const PointX<Scalar>& p) const override {
        const Scalar r = std::abs(coord(p, j_) - c_);
        return r > Scalar(0) ? std::log(r) : -std::numeric_limits<Scalar>::infinity();
    }
    void derivs(const PointX<Scalar>& p, Derivs<Scalar>& out) const override {
        const Complex<Scalar> zeta = coord(p, j_) - c_;
        out.value = std::log(std::abs(zeta));
        out.grad[j_] = Scalar(0.5) / zeta;
    }
    Scalar clearance(const PointX<Scalar>& p) const override { return std::abs(coord(p, j_) - c_); }
    std::string describe() const override {
        std::ostringstream os;
        os << "log|z" << j_ + 1 << "|";
        return os.str();
    }

    int coord_index() const { return j_; }
    Complex<Scalar> center() const { return c_; }

private:
    int j_;
    Complex<Scalar> c_;
};

/// (1/2) log(|z_j - c|^2 + s): the log-shift regularization of log|z_j - c|.
template <class Scalar>
class ShiftedLog final : public PshNode<Scalar> {
public:
    ShiftedLog(int j, Complex<Scalar> c, Scalar s) : j_(j), c_(c), s_(s) {
        if (!(s > 0)) throw InvalidArgument("ShiftedLog: shift must be positive");
    }
    int dim() const override { return j_ + 1; }
    bool analytic() const override { return true; }
    Scalar eval(const PointX<Scalar>& p) const override {
        return Scalar(0.5) * std::log(std::norm(coord(p, j_) - c_) + s_);
    }
    void derivs(const PointX<Scalar>& p, Derivs<Scalar>& out) const override {
        const Complex<Scalar> zeta = coord(p, j_) - c_;
        const Scalar q = std::norm(zeta) + s_;
        out.value = Scalar(0.5) * std::log(q);
        out.grad[j_] = Scalar(0.5) * std::conj(zeta) / q;
        out.hess(j_, j_) = Complex<Scalar>(Scalar(0.5) * s_ / (q * q), 0);
    }
    std::string describe() const override {
        std::ostringstream os;
        os << "(1/2) log(|z" << j_ + 1 << "|^2 + " << s_ << ")";
        return os.str();
    }

private:
    int j_;
    Complex<Scalar> c_;
    Scalar s_;
};

/// f(z_j) = -sqrt(-log|z_j|) on 0 < |z_j| < 1.
template <class Scalar>
class NegSqrtNegLog final : public PshNode<Scalar> {
public:
    explicit NegSqrtNegLog(int j) : j_(j) {}
    int dim() const override { return j_ + 1; }
    bool analytic() const override { return true; }
    Scalar eval(const PointX<Scalar>& p) const override {
        const Scalar r = std::abs(coord(p, j_));
        if (!(r > Scalar(0)) || !(r < Scalar(1))) return std::numeric_limits<Scalar>::quiet_NaN();
        return -std::sqrt(-std::log(r));
    }
    void derivs(const PointX<Scalar>& p, Derivs<Scalar>& out) const override {
        const Complex<Scalar> z = coord(p, j_);
        const Scalar L = -std::log(std::abs(z));
        const Scalar sq = std::sqrt(L);
        out.value = -sq;
        out.grad[j_] = Scalar(1) / (Scalar(4) * z * sq);
        out.hess(j_, j_) = Complex<Scalar>(Scalar(1) / (Scalar(16) * std::norm(z) * sq * sq * sq), 0);
    }
    Scalar clearance(const PointX<Scalar>& p) const override {
        const Scalar r = std::abs(coord(p, j_));
        return std::min(r, Scalar(1) - r);
    }
    void check_box(std::span<const Scalar> lo, std::span<const Scalar> hi) const override {
        const Scalar mx = std::max(std::abs(lo[2 * j_]), std::abs(hi[2 * j_]));
        const Scalar my = std::max(std::abs(lo[2 * j_ + 1]), std::abs(hi[2 * j_ + 1]));
        if (mx * mx + my * my >= Scalar(1))
            throw PreconditionError("-sqrt(-log|z|): box must lie strictly inside the unit disc");
    }
    std::string describe() const override {
        std::ostringstream os;
        os << "-sqrt(-log|z" << j_ + 1 << "|)";
        return os.str();
    }

private:
    int j_;
};

/// log|P(z)| for a holomorphic polynomial P; pluriharmonic off {P = 0}.
template <class Scalar>
class LogPolyAbs final : public PshNode<Scalar> {
public:
    struct Monomial {
        Complex<Scalar> c;
        int e1 = 0, e2 = 0;
    };
    LogPolyAbs(std::vector<Monomial> terms, int dim) : terms_(std::move(terms)), dim_(dim) {}
    int dim() const override { return dim_; }
    bool analytic() const override { return true; }
    bool pluriharmonic() const override { return true; }

    Scalar eval(const PointX<Scalar>& p) const override {
        const Complex<Scalar> v = value_of(p);
        const Scalar a = std::abs(v);
        return a > Scalar(0) ? std::log(a) : -std::numeric_limits<Scalar>::infinity();
    }
    void derivs(const PointX<Scalar>& p, Derivs<Scalar>& out) const override {
        const Complex<Scalar> v = value_of(p);
        out.value = std::log(std::abs(v));
        for (int j = 0; j < dim_; ++j) out.grad[j] = partial(p, j) / (Scalar(2) * v);
    }
    Scalar clearance(const PointX<Scalar>& p) const override {
        const Scalar a = std::abs(value_of(p));
        Scalar g = Scalar(0);
        for (int j = 0; j < dim_; ++j) g += std::abs(partial(p, j));
        return a / std::max(g, Scalar(1e-12));
    }
    std::string describe() const override { return "log|P(z)|"; }

private:
    Complex<Scalar> value_of(const PointX<Scalar>& p) const {
        Complex<Scalar> v(0, 0);
        const Complex<Scalar> z1 = coord(p, 0);
        const Complex<Scalar> z2 = dim_ > 1 ? coord(p, 1) : Complex<Scalar>(0, 0);
        for (const auto& t : terms_)
            v += t.c * std::pow(z1, t.e1) * (dim_ > 1 ? std::pow(z2, t.e2) : Complex<Scalar>(1, 0));
        return v;
    }
    Complex<Scalar> partial(const PointX<Scalar>& p, int j) const {
        Complex<Scalar> v(0, 0);
        const Complex<Scalar> z1 = coord(p, 0);
        const Complex<Scalar> z2 = dim_ > 1 ? coord(p, 1) : Complex<Scalar>(0, 0);
        for (const auto& t : terms_) {
            const int e = j == 0 ? t.e1 : t.e2;
            if (e == 0) continue;
            Complex<Scalar> term = t.c * Scalar(e);
            term *= std::pow(z1, j == 0 ? t.e1 - 1 : t.e1);
            if (dim_ > 1) term *= std::pow(z2, j == 1 ? t.e2 - 1 : t.e2);
            v += term;
        }
        return v;
    }

    std::vector<Monomial> terms_;
    int dim_;
};

/// log of the Euclidean norm |z| of C^n: PSH with rank-deficient Hessian,
/// so its top Monge-Ampere power vanishes away from the origin.
template <class Scalar>
class LogNorm final : public PshNode<Scalar> {
public:
    explicit LogNorm(int n) : n_(n) {}
    int dim() const override { return n_; }
    bool analytic() const override { return true; }
    Scalar eval(const PointX<Scalar>& p) const override {
        const Scalar r = p.norm();
        return r > Scalar(0) ? std::log(r) : -std::numeric_limits<Scalar>::infinity();
    }
    void derivs(const PointX<Scalar>& p, Derivs<Scalar>& out) const override {
        const Scalar r2 = p.squaredNorm();
        out.value = Scalar(0.5) * std::log(r2);
        Eigen::Matrix<Complex<Scalar>, 2, 1> z = Eigen::Matrix<Complex<Scalar>, 2, 1>::Zero();
        for (int j = 0; j < n_; ++j) z[j] = coord(p, j);
        for (int j = 0; j < n_; ++j) {
            out.grad[j] = std::conj(z[j]) / (Scalar(2) * r2);
            for (int k = 0; k < n_; ++k) {
                out.hess(j, k) = -std::conj(z[j]) * z[k] / (Scalar(2) * r2 * r2);
                if (j == k) out.hess(j, k) += Scalar(1) / (Scalar(2) * r2);
            }
        }
    }
    Scalar clearance(const PointX<Scalar>& p) const override { return p.norm(); }
    std::string describe() const override { return "log|z|"; }

private:
    int n_;
};

/// Re(sum a_j z_j) + c: pluriharmonic affine part.
template <class Scalar>
class RealLinear final : public PshNode<Scalar> {
public:
    RealLinear(std::vector<Complex<Scalar>> a, Scalar c) : a_(std::move(a)), c_(c) {}
    int dim() const override { return static_cast<int>(a_.size()); }
    bool analytic() const override { return true; }
    bool pluriharmonic() const override { return true; }
    Scalar eval(const PointX<Scalar>& p) const override {
        Scalar v = c_;
        for (std::size_t j = 0; j < a_.size(); ++j) v += (a_[j] * coord(p, static_cast<int>(j))).real();
        return v;
    }
    void derivs(const PointX<Scalar>& p, Derivs<Scalar>& out) const override {
        out.value = eval(p);
        for (std::size_t j = 0; j < a_.size(); ++j) out.grad[j] = a_[j] / Scalar(2);
    }
    std::string describe() const override { return "Re(a . z) + c"; }

private:
    std::vector<Complex<Scalar>> a_;
    Scalar c_;
};

template <class Scalar>
class Sum final : public PshNode<Scalar> {
public:
    Sum(std::vector<std::pair<Scalar, NodePtr<Scalar>>> terms) : terms_(std::move(terms)) {
        for (const auto& [c, node] : terms_)
            if (c < Scalar(0) && !node->pluriharmonic())
                throw InvalidArgument("Sum: negative coefficient on a non-pluriharmonic term");
    }
    int dim() const override {
        int d = 1;
        for (const auto& [c, node] : terms_) d = std::max(d, node->dim());
        return d;
    }
    bool analytic() const override {
        for (const auto& [c, node] : terms_)
            if (!node->analytic()) return false;
        return true;
    }
    bool pluriharmonic() const override {
        for (const auto& [c, node] : terms_)
            if (!node->pluriharmonic()) return false;
        return true;
    }
    Scalar eval(const PointX<Scalar>& p) const override {
        Scalar v = Scalar(0);
        for (const auto& [c, node] : terms_) v += c * node->eval(p);
        return v;
    }
    void derivs(const PointX<Scalar>& p, Derivs<Scalar>& out) const override {
        Derivs<Scalar> tmp;
        for (const auto& [c, node] : terms_) {
            tmp.reset(out.n);
            node->derivs(p, tmp);
            out.value += c * tmp.value;
            out.grad += c * tmp.grad;
            out.hess += c * tmp.hess;
        }
    }
    Scalar clearance(const PointX<Scalar>& p) const override {
        Scalar m = std::numeric_limits<Scalar>::infinity();
        for (const auto& [c, node] : terms_) m = std::min(m, node->clearance(p));
        return m;
    }
    void check_box(std::span<const Scalar> lo, std::span<const Scalar> hi) const override {
        for (const auto& [c, node] : terms_) node->check_box(lo, hi);
    }
    std::string describe() const override {
        std::ostringstream os;
        bool first = true;
        for (const auto& [c, node] : terms_) {
            if (!first) os << " + ";
            if (c != Scalar(1)) os << c << "*";
            os << node->describe();
            first = false;
        }
        return os.str();
    }

    const auto& terms() const { return terms_; }

private:
    std::vector<std::pair<Scalar, NodePtr<Scalar>>> terms_;
};

/// u(z, w) = -L(z) R(w) with nonpositive one-variable factors L, R;
/// L reads coordinate 0, R reads coordinate 1.
template <class Scalar>
class NegProduct final : public PshNode<Scalar> {
public:
    NegProduct(NodePtr<Scalar> left, NodePtr<Scalar> right)
        : left_(std::move(left)), right_(std::move(right)) {
        if (left_->dim() != 1 || right_->dim() != 1)
            throw InvalidArgument("NegProduct: factors must be one-variable");
    }
    int dim() const override { return 2; }
    bool analytic() const override { return left_->analytic() && right_->analytic(); }

    Scalar eval(const PointX<Scalar>& p) const override {
        const Scalar l = left_->eval(sub(p, 0)), r = right_->eval(sub(p, 1));
        if (l > Scalar(0) || r > Scalar(0)) return std::numeric_limits<Scalar>::quiet_NaN();
        return -l * r;
    }
    void derivs(const PointX<Scalar>& p, Derivs<Scalar>& out) const override {
        Derivs<Scalar> dl, dr;
        dl.reset(1);
        dr.reset(1);
        left_->derivs(sub(p, 0), dl);
        right_->derivs(sub(p, 1), dr);
        out.value = -dl.value * dr.value;
        out.grad[0] = -dl.grad[0] * dr.value;
        out.grad[1] = -dl.value * dr.grad[0];
        out.hess(0, 0) = -dl.hess(0, 0) * dr.value;
        out.hess(1, 1) = -dl.value * dr.hess(0, 0);
        out.hess(0, 1) = -dl.grad[0] * std::conj(dr.grad[0]);
        out.hess(1, 0) = std::conj(out.hess(0, 1));
    }
    Scalar clearance(const PointX<Scalar>& p) const override {
        return std::min(left_->clearance(sub(p, 0)), right_->clearance(sub(p, 1)));
    }
    void check_box(std::span<const Scalar> lo, std::span<const Scalar> hi) const override {
        left_->check_box(lo.subspan(0, 2), hi.subspan(0, 2));
        right_->check_box(lo.subspan(2, 2), hi.subspan(2, 2));
    }
    std::string describe() const override {
        return "-(" + left_->describe() + ")(" + right_->describe() + " in w)";
    }

private:
    static PointX<Scalar> sub(const PointX<Scalar>& p, int j) {
        PointX<Scalar> q(2);
        q[0] = p[2 * j];
        q[1] = p[2 * j + 1];
        return q;
    }

    NodePtr<Scalar> left_, right_;
};

/// chi(u) for a ChiWeight chi; covers max-with-constant cutoffs.
template <class Scalar>
class ChiCompose final : public PshNode<Scalar> {
public:
    ChiCompose(ChiWeight<Scalar> chi, NodePtr<Scalar> child)
        : chi_(std::move(chi)), child_(std::move(child)) {}
    int dim() const override { return child_->dim(); }
    bool analytic() const override { return child_->analytic(); }
    Scalar eval(const PointX<Scalar>& p) const override {
        const Scalar u = child_->eval(p);
        if (!std::isfinite(u)) {
            // chi continuous and monotone: bounded chi maps -inf to its bound
            if (u == -std::numeric_limits<Scalar>::infinity() && chi_.bounded_below())
                return chi_.lower_bound();
            return std::numeric_limits<Scalar>::quiet_NaN();
        }
        if (chi_.needs_negative() && u >= Scalar(0)) return std::numeric_limits<Scalar>::quiet_NaN();
        return chi_.chi(u);
    }
    void derivs(const PointX<Scalar>& p, Derivs<Scalar>& out) const override {
        Derivs<Scalar> du;
        du.reset(out.n);
        child_->derivs(p, du);
        const Scalar c1 = chi_.chi1(du.value), c2 = chi_.chi2(du.value);
        out.value = chi_.chi(du.value);
        out.grad = c1 * du.grad;
        out.hess = c1 * du.hess;
        out.hess.noalias() += c2 * (du.grad * du.grad.adjoint());
    }
    Scalar clearance(const PointX<Scalar>& p) const override {
        Scalar m = child_->clearance(p);
        const auto kinks = chi_.kinks();
        if (!kinks.empty()) {
            const Scalar u = child_->eval(p);
            Scalar gn = Scalar(1);
            if (child_->analytic() && std::isfinite(u)) {
                Derivs<Scalar> du;
                du.reset(2);
                child_->derivs(p, du);
                gn = std::max(Scalar(2) * du.grad.norm(), Scalar(1e-9));
            }
            if (std::isfinite(u))
                for (Scalar k : kinks) m = std::min(m, std::abs(u - k) / gn);
        }
        return m;
    }
    void check_box(std::span<const Scalar> lo, std::span<const Scalar> hi) const override {
        child_->check_box(lo, hi);
    }
    std::string describe() const override {
        return chi_.describe() + " of [" + child_->describe() + "]";
    }

    const ChiWeight<Scalar>& chi() const { return chi_; }
    const NodePtr<Scalar>& child() const { return child_; }

private:
    ChiWeight<Scalar> chi_;
    NodePtr<Scalar> child_;
};

/// Smoothing of the child by convolution with the standard bump at scale eps,
/// evaluated pointwise by a fixed tensor quadrature of the convolution
/// integral. Derivatives are finite-difference only.
template <class Scalar>
class Mollified final : public PshNode<Scalar> {
public:
    Mollified(NodePtr<Scalar> child, Scalar eps, int ambient_dim)
        : child_(std::move(child)), eps_(eps), dim_(ambient_dim) {
        if (!(eps > 0)) throw InvalidArgument("Mollified: eps must be positive");
    }
    int dim() const override { return std::max(dim_, child_->dim()); }
    bool analytic() const override { return false; }
    Scalar eval(const PointX<Scalar>& p) const override {
        const auto& rule = quad_rule();
        const int A = 2 * dim();
        PointX<Scalar> q(A);
        Scalar num = Scalar(0), den = Scalar(0);
        std::vector<int> idx(A, 0);
        for (;;) {
            Scalar w = Scalar(1), r2 = Scalar(0);
            for (int a = 0; a < A; ++a) {
                w *= rule.w[idx[a]];
                r2 += rule.x[idx[a]] * rule.x[idx[a]];
            }
            const Scalar k = MollifierSpec<Scalar>::profile(std::sqrt(r2));
            if (k > Scalar(0)) {
                for (int a = 0; a < A; ++a) q[a] = p[a] + eps_ * rule.x[idx[a]];
                const Scalar v = child_->eval(q);
                if (!std::isfinite(v)) return std::numeric_limits<Scalar>::quiet_NaN();
                num += w * k * v;
                den += w * k;
            }
            int a = A - 1;
            while (a >= 0 && ++idx[a] == npts()) idx[a--] = 0;
            if (a < 0) break;
        }
        return num / den;
    }
    void derivs(const PointX<Scalar>&, Derivs<Scalar>&) const override {
        throw PreconditionError("mollified spec is finite-difference only");
    }
    Scalar clearance(const PointX<Scalar>& p) const override {
        return child_->clearance(p) - eps_;
    }
    void check_box(std::span<const Scalar> lo, std::span<const Scalar> hi) const override {
        std::vector<Scalar> l(lo.begin(), lo.end()), h(hi.begin(), hi.end());
        for (auto& v : l) v -= eps_;
        for (auto& v : h) v += eps_;
        child_->check_box(l, h);
    }
    std::string describe() const override {
        std::ostringstream os;
        os << "mollify(eps=" << eps_ << ") of [" << child_->describe() << "]";
        return os.str();
    }

private:
    static constexpr int npts() { return 8; }
    struct Rule {
        std::array<Scalar, 8> x, w;
    };
    static const Rule& quad_rule() {
        // 8-point Gauss-Legendre on [-1, 1]
        static const Rule r = [] {
            Rule q;
            const double xs[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                  0.9602898564975363};
            const double ws[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                  0.1012285362903763};
            for (int i = 0; i < 4; ++i) {
                q.x[i] = Scalar(-xs[3 - i]);
                q.w[i] = Scalar(ws[3 - i]);
                q.x[4 + i] = Scalar(xs[i]);
                q.w[4 + i] = Scalar(ws[i]);
            }
            return q;
        }();
        return r;
    }

    NodePtr<Scalar> child_;
    Scalar eps_;
    int dim_;
};

}  // namespace nodes

// ---------------------------------------------------------------------------
// PshSpec: a closed-form PSH function over C^n
// ---------------------------------------------------------------------------

template <class Scalar = double>
class PshSpec {
public:
    PshSpec() = default;
    PshSpec(NodePtr<Scalar> root, int ambient_n, std::string name = "")
        : root_(std::move(root)), n_(ambient_n), name_(std::move(name)) {
        if (!root_) throw InvalidArgument("PshSpec: null expression");
        if (root_->dim() > n_) throw InvalidArgument("PshSpec: expression reads beyond dimension");
        if (n_ < 1 || n_ > 2) throw InvalidArgument("PshSpec: dimension must be 1 or 2");
    }

    int dim() const { return n_; }
    bool analytic() const { return root_->analytic(); }
    bool pluriharmonic() const { return root_->pluriharmonic(); }
    const NodePtr<Scalar>& node() const { return root_; }
    const std::string& name() const { return name_; }
    std::string describe() const { return root_->describe(); }

    Scalar eval_raw(const PointX<Scalar>& p) const { return root_->eval(p); }
    Scalar clearance(const PointX<Scalar>& p) const { return root_->clearance(p); }

private:
    NodePtr<Scalar> root_;
    int n_ = 1;
    std::string name_;
};

/// Closed-form value; throws when the point lies on the singular set.
template <class Scalar>
Scalar eval(const PshSpec<Scalar>& spec, const PointX<Scalar>& p) {
    const Scalar v = spec.eval_raw(p);
    if (!std::isfinite(v)) throw PreconditionError("eval: point on the singular set of " + spec.describe());
    return v;
}

/// Exact complex gradient and Hessian; throws for finite-difference-only specs.
template <class Scalar>
Derivs<Scalar> eval_complex_derivs(const PshSpec<Scalar>& spec, const PointX<Scalar>& p) {
    if (!spec.analytic())
        throw PreconditionError("eval_complex_derivs: spec is finite-difference only");
    if (!(spec.clearance(p) > Scalar(0)))
        throw PreconditionError("eval_complex_derivs: point on the singular set");
    Derivs<Scalar> d;
    d.reset(spec.dim());
    spec.node()->derivs(p, d);
    return d;
}

// ---------------------------------------------------------------------------
// Approximating sequences
// ---------------------------------------------------------------------------

template <class Scalar = double>
struct SequenceScheme {
    enum class Kind { MaxCutoff, LogShift, ChiCompose, MollifyScale };
    Kind kind = Kind::MaxCutoff;

    /// MaxCutoff: smoothing scale for the smooth max (0 = hard kink;
    /// negative = resolve to 5h of the target grid at sampling time).
    Scalar smoothing = Scalar(0);

    /// ChiCompose: chi_{m_j} with m_j = m0 * growth^{j-1} (exp family).
    Scalar m0 = Scalar(1);
    Scalar growth = Scalar(2);

    /// MollifyScale: eps_j = eps0 / j.
    Scalar eps0 = Scalar(0.3);

    static SequenceScheme max_cutoff(Scalar smoothing = Scalar(0)) {
        SequenceScheme s;
        s.kind = Kind::MaxCutoff;
        s.smoothing = smoothing;
        return s;
    }
    static SequenceScheme log_shift() {
        SequenceScheme s;
        s.kind = Kind::LogShift;
        return s;
    }
    static SequenceScheme chi_compose(Scalar m0 = Scalar(1), Scalar growth = Scalar(2)) {
        SequenceScheme s;
        s.kind = Kind::ChiCompose;
        s.m0 = m0;
        s.growth = growth;
        return s;
    }
    static SequenceScheme mollify_scale(Scalar eps0) {
        SequenceScheme s;
        s.kind = Kind::MollifyScale;
        s.eps0 = eps0;
        return s;
    }

    std::string describe() const {
        std::ostringstream os;
        switch (kind) {
            case Kind::MaxCutoff: os << "max-cutoff(smoothing=" << smoothing << ")"; break;
            case Kind::LogShift: os << "log-shift"; break;
            case Kind::ChiCompose: os << "chi-compose(m0=" << m0 << ",growth=" << growth << ")"; break;
            case Kind::MollifyScale: os << "mollify-scale(eps0=" << eps0 << ")"; break;
        }
        return os.str();
    }
};

namespace detail {

/// log_shift structural transform: every log|z_j - c| atom becomes
/// (1/2) log(|z_j - c|^2 + shift); any other non-linear atom is incompatible.
template <class Scalar>
NodePtr<Scalar> log_shift_node(const NodePtr<Scalar>& node, Scalar shift) {
    using namespace nodes;
    if (auto log = std::dynamic_pointer_cast<const LogAbs<Scalar>>(node))
        return std::make_shared<ShiftedLog<Scalar>>(log->coord_index(), log->center(), shift);
    if (auto sum = std::dynamic_pointer_cast<const Sum<Scalar>>(node)) {
        std::vector<std::pair<Scalar, NodePtr<Scalar>>> terms;
        for (const auto& [c, child] : sum->terms()) terms.emplace_back(c, log_shift_node(child, shift));
        return std::make_shared<Sum<Scalar>>(std::move(terms));
    }
    if (std::dynamic_pointer_cast<const Const<Scalar>>(node) ||
        std::dynamic_pointer_cast<const RealLinear<Scalar>>(node))
        return node;
    throw InvalidArgument("log-shift scheme requires a sum of log-type atoms");
}

}  // namespace detail

/// The j-th member of an approximating sequence: pointwise >= the base spec
/// and nonincreasing in j.
///
/// max_cutoff distributes over top-level sums: each summand is cut off at -j
/// separately, which keeps the Monge-Ampere measure of sums of one-variable
/// logs in product form.
template <class Scalar>
PshSpec<Scalar> make_sequence(const PshSpec<Scalar>& spec, const SequenceScheme<Scalar>& scheme,
                              int j) {
    using namespace nodes;
    if (j < 1) throw InvalidArgument("make_sequence: index must be >= 1");
    using Kind = typename SequenceScheme<Scalar>::Kind;
    std::ostringstream nm;
    nm << spec.name() << "[" << scheme.describe() << ", j=" << j << "]";
    switch (scheme.kind) {
        case Kind::MaxCutoff: {
            const Scalar eps = std::max(scheme.smoothing, Scalar(0));
            const auto chi = ChiWeight<Scalar>::cutoff(Scalar(-j), eps);
            if (auto sum = std::dynamic_pointer_cast<const Sum<Scalar>>(spec.node())) {
                std::vector<std::pair<Scalar, NodePtr<Scalar>>> terms;
                for (const auto& [c, child] : sum->terms()) {
                    if (child->pluriharmonic() && std::dynamic_pointer_cast<const Const<Scalar>>(child)) {
                        terms.emplace_back(c, child);
                        continue;
                    }
                    NodePtr<Scalar> scaled = c == Scalar(1)
                        ? child
                        : NodePtr<Scalar>(std::make_shared<Sum<Scalar>>(
                              std::vector<std::pair<Scalar, NodePtr<Scalar>>>{{c, child}}));
                    terms.emplace_back(Scalar(1), std::make_shared<ChiCompose<Scalar>>(chi, scaled));
                }
                return PshSpec<Scalar>(std::make_shared<Sum<Scalar>>(std::move(terms)), spec.dim(),
                                       nm.str());
            }
            return PshSpec<Scalar>(std::make_shared<ChiCompose<Scalar>>(chi, spec.node()), spec.dim(),
                                   nm.str());
        }
        case Kind::LogShift:
            return PshSpec<Scalar>(detail::log_shift_node(spec.node(), Scalar(1) / Scalar(j)),
                                   spec.dim(), nm.str());
        case Kind::ChiCompose: {
            const Scalar m = scheme.m0 * std::pow(scheme.growth, Scalar(j - 1));
            return PshSpec<Scalar>(
                std::make_shared<ChiCompose<Scalar>>(ChiWeight<Scalar>::exp_family(m), spec.node()),
                spec.dim(), nm.str());
        }
        case Kind::MollifyScale:
            return PshSpec<Scalar>(
                std::make_shared<Mollified<Scalar>>(spec.node(), scheme.eps0 / Scalar(j), spec.dim()),
                spec.dim(), nm.str());
    }
    throw InvalidArgument("make_sequence: unknown scheme");
}

/// (z, w) -> u(z) + v(w) on the product domain; the product dimension is
/// capped at 2, so both factors must be one-variable here.
template <class Scalar>
PshSpec<Scalar> sum_product(const PshSpec<Scalar>& u, const PshSpec<Scalar>& v) {
    if (u.dim() + v.dim() > 2)
        throw InvalidArgument("sum_product: product dimension exceeds 2");
    using namespace nodes;
    struct Shift final : PshNode<Scalar> {
        NodePtr<Scalar> inner;
        int offset;
        Shift(NodePtr<Scalar> in, int off) : inner(std::move(in)), offset(off) {}
        int dim() const override { return inner->dim() + offset; }
        bool analytic() const override { return inner->analytic(); }
        bool pluriharmonic() const override { return inner->pluriharmonic(); }
        Scalar eval(const PointX<Scalar>& p) const override { return inner->eval(sub(p)); }
        void derivs(const PointX<Scalar>& p, Derivs<Scalar>& out) const override {
            Derivs<Scalar> d;
            d.reset(inner->dim());
            inner->derivs(sub(p), d);
            out.value += d.value;
            for (int a = 0; a < inner->dim(); ++a) {
                out.grad[a + offset] += d.grad[a];
                for (int b = 0; b < inner->dim(); ++b) out.hess(a + offset, b + offset) += d.hess(a, b);
            }
        }
        Scalar clearance(const PointX<Scalar>& p) const override { return inner->clearance(sub(p)); }
        void check_box(std::span<const Scalar> lo, std::span<const Scalar> hi) const override {
            inner->check_box(lo.subspan(2 * offset), hi.subspan(2 * offset));
        }
        std::string describe() const override { return inner->describe() + (offset ? " in w" : ""); }
        PointX<Scalar> sub(const PointX<Scalar>& p) const {
            PointX<Scalar> q(2 * inner->dim());
            for (int a = 0; a < 2 * inner->dim(); ++a) q[a] = p[2 * offset + a];
            return q;
        }
    };
    std::vector<std::pair<Scalar, NodePtr<Scalar>>> terms;
    terms.emplace_back(Scalar(1), u.node());
    terms.emplace_back(Scalar(1), std::make_shared<Shift>(v.node(), u.dim()));
    return PshSpec<Scalar>(std::make_shared<Sum<Scalar>>(std::move(terms)), u.dim() + v.dim(),
                           u.name() + "(z) + " + v.name() + "(w)");
}

// ---------------------------------------------------------------------------
// Sampling onto grids
// ---------------------------------------------------------------------------

/// Closed-form evaluation at every node; a node is valid when it is
/// geometrically valid, one stencil radius clear of the spec's singular set
/// and kinks, and carries a finite value.
template <class Scalar>
GridFunction<Scalar> sample(const PshSpec<Scalar>& spec, const GridDomain<Scalar>& d) {
    if (spec.dim() != d.n) throw InvalidArgument("sample: spec and grid dimension differ");
    spec.node()->check_box(std::span<const Scalar>(d.lo), std::span<const Scalar>(d.hi));

    GridFunction<Scalar> f;
    f.domain = d;
    f.values.resize(d.node_count());
    f.valid.assign(d.node_count(), 0);
    const Scalar margin = d.stencil_radius();

    const std::int64_t total = d.node_count();
    parallel_for(static_cast<std::size_t>(total), [&](std::size_t lo, std::size_t hi) {
        std::array<std::int64_t, 4> idx{};
        for (std::size_t i = lo; i < hi; ++i) {
            d.decode(static_cast<std::int64_t>(i), std::span<std::int64_t>(idx.data(), d.axes()));
            const PointX<Scalar> p = d.point(std::span<const std::int64_t>(idx.data(), d.axes()));
            const Scalar v = spec.eval_raw(p);
            f.values[i] = v;
            if (std::isfinite(v) && d.geometric_valid(std::span<const std::int64_t>(idx.data(), d.axes())) &&
                spec.clearance(p) >= margin)
                f.valid[i] = 1;
        }
    });
    return f;
}

// ---------------------------------------------------------------------------
// Named catalog entries
// ---------------------------------------------------------------------------

namespace catalog {

using std::make_shared;

/// |z_1|^2 (+ |z_2|^2 when n = 2) + offset.
template <class Scalar = double>
PshSpec<Scalar> abs_sq(int n, Scalar offset = Scalar(0)) {
    std::vector<std::pair<Scalar, NodePtr<Scalar>>> terms;
    for (int j = 0; j < n; ++j)
        terms.emplace_back(Scalar(1), make_shared<nodes::AbsSq<Scalar>>(j));
    if (offset != Scalar(0))
        terms.emplace_back(Scalar(1), make_shared<nodes::Const<Scalar>>(offset));
    return PshSpec<Scalar>(make_shared<nodes::Sum<Scalar>>(std::move(terms)), n, "abs-sq");
}

/// log|z_j| viewed in ambient dimension n.
template <class Scalar = double>
PshSpec<Scalar> log_abs(int n, int j = 0) {
    return PshSpec<Scalar>(make_shared<nodes::LogAbs<Scalar>>(j), n, "log-abs");
}

/// log|z_1| + log|z_2|.
template <class Scalar = double>
PshSpec<Scalar> log_sum() {
    std::vector<std::pair<Scalar, NodePtr<Scalar>>> terms;
    terms.emplace_back(Scalar(1), make_shared<nodes::LogAbs<Scalar>>(0));
    terms.emplace_back(Scalar(1), make_shared<nodes::LogAbs<Scalar>>(1));
    return PshSpec<Scalar>(make_shared<nodes::Sum<Scalar>>(std::move(terms)), 2, "log-sum");
}

/// log|z_1|^2 + log|z_2|^2, maximal in C^2 with log-shift approximants of
/// non-vanishing Monge-Ampere mass.
template <class Scalar = double>
PshSpec<Scalar> cegrell() {
    std::vector<std::pair<Scalar, NodePtr<Scalar>>> terms;
    terms.emplace_back(Scalar(2), make_shared<nodes::LogAbs<Scalar>>(0));
    terms.emplace_back(Scalar(2), make_shared<nodes::LogAbs<Scalar>>(1));
    return PshSpec<Scalar>(make_shared<nodes::Sum<Scalar>>(std::move(terms)), 2, "cegrell");
}

/// u(z, w) = -sqrt(log|z| log|w|), maximal in the punctured bidisc.
template <class Scalar = double>
PshSpec<Scalar> blocki() {
    auto f = make_shared<nodes::NegSqrtNegLog<Scalar>>(0);
    return PshSpec<Scalar>(make_shared<nodes::NegProduct<Scalar>>(f, f), 2, "blocki");
}

/// v = |z_1|^2 + x_2 + y_2 - M: a maximal barrier, negative once M dominates
/// sup(|z|^2 + |x_2| + |y_2|) over the working domain.
template <class Scalar = double>
PshSpec<Scalar> barrier_v(Scalar M = Scalar(6)) {
    std::vector<std::pair<Scalar, NodePtr<Scalar>>> terms;
    terms.emplace_back(Scalar(1), make_shared<nodes::AbsSq<Scalar>>(0));
    terms.emplace_back(Scalar(1), make_shared<nodes::RealLinear<Scalar>>(
                                      std::vector<Complex<Scalar>>{Complex<Scalar>(0, 0),
                                                                   Complex<Scalar>(1, -1)},
                                      -M));
    return PshSpec<Scalar>(make_shared<nodes::Sum<Scalar>>(std::move(terms)), 2, "barrier-v");
}

/// Re(a1 z_1 + a2 z_2) + c (pluriharmonic).
template <class Scalar = double>
PshSpec<Scalar> re_affine(int n, std::vector<Complex<Scalar>> a, Scalar c = Scalar(0)) {
    a.resize(n, Complex<Scalar>(0, 0));
    return PshSpec<Scalar>(make_shared<nodes::RealLinear<Scalar>>(std::move(a), c), n, "re-affine");
}

/// (1/2) log(|z_j|^2 + s): smooth log envelope.
template <class Scalar = double>
PshSpec<Scalar> shifted_log(int n, int j, Scalar s) {
    return PshSpec<Scalar>(
        make_shared<nodes::ShiftedLog<Scalar>>(j, Complex<Scalar>(0, 0), s), n, "shifted-log");
}

/// log|z| with the Euclidean norm of C^n.
template <class Scalar = double>
PshSpec<Scalar> log_norm(int n) {
    return PshSpec<Scalar>(make_shared<nodes::LogNorm<Scalar>>(n), n, "log-norm");
}

/// Clamped radial log envelope max((log|z| - log r0)/(log R - log r0), 0),
/// smoothed at scale eps: a capacity candidate in [0, 1) on {|z| < R}.
template <class Scalar = double>
PshSpec<Scalar> log_norm_envelope(int n, Scalar r0, Scalar R, Scalar eps = Scalar(0.05)) {
    if (!(0 < r0 && r0 < R)) throw InvalidArgument("log_norm_envelope: need 0 < r0 < R");
    const Scalar slope = Scalar(1) / (std::log(R) - std::log(r0));
    std::vector<std::pair<Scalar, NodePtr<Scalar>>> affine;
    affine.emplace_back(slope, make_shared<nodes::LogNorm<Scalar>>(n));
    affine.emplace_back(Scalar(1), make_shared<nodes::Const<Scalar>>(-slope * std::log(r0)));
    auto lin = make_shared<nodes::Sum<Scalar>>(std::move(affine));
    return PshSpec<Scalar>(
        make_shared<nodes::ChiCompose<Scalar>>(ChiWeight<Scalar>::cutoff(Scalar(0), eps), lin), n,
        "log-norm-envelope");
}

/// Clamped affine profile max(a |z|^2 + b, 0) (smoothed), values in [0, 1]
/// on {|z|^2 <= (1 - b)/a}.
template <class Scalar = double>
PshSpec<Scalar> abs_sq_profile(int n, Scalar a, Scalar b, Scalar eps = Scalar(0.02)) {
    if (!(a >= 0)) throw InvalidArgument("abs_sq_profile: need a >= 0");
    std::vector<std::pair<Scalar, NodePtr<Scalar>>> terms;
    for (int j = 0; j < n; ++j) terms.emplace_back(a, make_shared<nodes::AbsSq<Scalar>>(j));
    terms.emplace_back(Scalar(1), make_shared<nodes::Const<Scalar>>(b));
    auto lin = make_shared<nodes::Sum<Scalar>>(std::move(terms));
    return PshSpec<Scalar>(
        make_shared<nodes::ChiCompose<Scalar>>(ChiWeight<Scalar>::cutoff(Scalar(0), eps), lin), n,
        "abs-sq-profile");
}

/// log|z_1 z_2|: rank-one analytic image, Monge-Ampere null off the axes.
template <class Scalar = double>
PshSpec<Scalar> log_prod() {
    using Node = nodes::LogPolyAbs<Scalar>;
    typename Node::Monomial m;
    m.c = Complex<Scalar>(1, 0);
    m.e1 = 1;
    m.e2 = 1;
    return PshSpec<Scalar>(make_shared<Node>(std::vector<typename Node::Monomial>{m}, 2), 2,
                           "log-prod");
}

}  // namespace catalog

// ---------------------------------------------------------------------------
// Structure detection for closed-form reductions
// ---------------------------------------------------------------------------

/// A sum of origin-centered one-variable log atoms, coefficient per
/// coordinate: u = sum_i c_i log|z_i|. Cutoff sequences of this form carry
/// their Monge-Ampere mass on explicit tori.
template <class Scalar>
std::optional<std::vector<std::pair<int, Scalar>>> as_log_sum(const PshSpec<Scalar>& spec) {
    auto sum = std::dynamic_pointer_cast<const nodes::Sum<Scalar>>(spec.node());
    std::vector<std::pair<int, Scalar>> out;
    auto add_atom = [&](const NodePtr<Scalar>& node, Scalar coeff) -> bool {
        auto log = std::dynamic_pointer_cast<const nodes::LogAbs<Scalar>>(node);
        if (!log || log->center() != Complex<Scalar>(0, 0)) return false;
        for (auto& [j, c] : out)
            if (j == log->coord_index()) return false;
        out.emplace_back(log->coord_index(), coeff);
        return true;
    };
    if (!sum) {
        if (add_atom(spec.node(), Scalar(1))) return out;
        return std::nullopt;
    }
    for (const auto& [c, child] : sum->terms())
        if (!add_atom(child, c)) return std::nullopt;
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace pshlab
