#include "solvers/darcy.hpp"

#include <cmath>
#include <sstream>

namespace dgp {

DarcyProblem DarcyProblem::with_unit_source(Field perm)
{
    Field src(perm.grid(), 1, 1.0);
    return DarcyProblem{std::move(perm), std::move(src)};
}

void DarcyProblem::validate() const
{
    const Grid& g = perm.grid();
    require(g.boundary == Boundary::DirichletZero, "Darcy fields must live on a DirichletZero grid");
    require(g.nx == g.ny && g.nx >= 8, "Darcy grid must be square with n >= 8");
    require(perm.channels() == 1 && source.channels() == 1, ErrorCode::ShapeMismatch, "Darcy fields are single-channel");
    require(perm.same_shape(source), ErrorCode::ShapeMismatch, "permeability and source grids differ");
    perm.require_finite("darcy permeability");
    source.require_finite("darcy source");
    for (double a : perm.values())
        require(a > 0.0, "Darcy permeability must be strictly positive");
}

namespace {

// Interior-only operator on a full-grid vector (boundary entries stay zero).
void apply_interior(const Field& perm, const std::vector<double>& u, std::vector<double>& out)
{
    const int n = perm.nx();
    const double inv_h2 = 1.0 / (perm.grid().hx() * perm.grid().hx());
    const auto& a = perm.storage();
    for (int j = 1; j < n - 1; ++j) {
        for (int i = 1; i < n - 1; ++i) {
            const int p = j * n + i;
            const double ap = a[p];
            const double ae = 0.5 * (ap + a[p + 1]), aw = 0.5 * (ap + a[p - 1]);
            const double an = 0.5 * (ap + a[p + n]), as = 0.5 * (ap + a[p - n]);
            out[p] = inv_h2 * ((ae + aw + an + as) * u[p] - ae * u[p + 1] - aw * u[p - 1] - an * u[p + n] - as * u[p - n]);
        }
    }
}

double interior_dot(int n, const std::vector<double>& x, const std::vector<double>& y)
{
    double s = 0.0;
    for (int j = 1; j < n - 1; ++j)
        for (int i = 1; i < n - 1; ++i) s += x[j * n + i] * y[j * n + i];
    return s;
}

} // namespace

Field darcy_apply(const Field& perm, const Field& u)
{
    require(perm.same_shape(u), ErrorCode::ShapeMismatch, "darcy_apply shape mismatch");
    std::vector<double> out(u.size(), 0.0);
    apply_interior(perm, u.storage(), out);
    return Field(u.grid(), 1, std::move(out));
}

Field solve_darcy(const DarcyProblem& p, const DarcyOptions& opt)
{
    p.validate();
    const int n = p.perm.nx();
    const std::size_t total = p.perm.size();

    std::vector<double> b(total, 0.0);
    for (int j = 1; j < n - 1; ++j)
        for (int i = 1; i < n - 1; ++i) b[j * n + i] = p.source.storage()[j * n + i];

    std::vector<double> x(total, 0.0);
    const double bnorm = std::sqrt(interior_dot(n, b, b));
    if (bnorm == 0.0) return Field(p.perm.grid(), 1, std::move(x));

    std::vector<double> r = b, d = b, ad(total, 0.0);
    double rr = interior_dot(n, r, r);
    const long max_iter = opt.max_iter > 0 ? opt.max_iter : 10L * n * n;
    const double target = opt.rel_tol * bnorm;
    for (long it = 0; it < max_iter; ++it) {
        if (std::sqrt(rr) <= target) return Field(p.perm.grid(), 1, std::move(x));
        apply_interior(p.perm, d, ad);
        const double alpha = rr / interior_dot(n, d, ad);
        for (int j = 1; j < n - 1; ++j)
            for (int i = 1; i < n - 1; ++i) {
                const int q = j * n + i;
                x[q] += alpha * d[q];
                r[q] -= alpha * ad[q];
            }
        const double rr_new = interior_dot(n, r, r);
        const double beta = rr_new / rr;
        rr = rr_new;
        for (int j = 1; j < n - 1; ++j)
            for (int i = 1; i < n - 1; ++i) d[j * n + i] = r[j * n + i] + beta * d[j * n + i];
    }
    if (std::sqrt(rr) <= target) return Field(p.perm.grid(), 1, std::move(x));
    std::ostringstream os;
    os << "Darcy CG did not converge in " << max_iter << " iterations (relative residual " << std::sqrt(rr) / bnorm
       << ")";
    throw Error(ErrorCode::SolverFailure, os.str());
}

} // namespace dgp
