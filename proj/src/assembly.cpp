#include "hnconv/assembly.hpp"

#include "hnconv/errors.hpp"
#include "hnconv/fe.hpp"
#include "hnconv/quadrature.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace hnconv {

Eigen::SparseMatrix<double> SparseTriplets::to_sparse() const {
    Eigen::SparseMatrix<double> m(rows, cols);
    m.setFromTriplets(entries.begin(), entries.end());
    return m;
}

void dump_matrix(const SparseTriplets& m, std::ostream& out) {
    const Eigen::SparseMatrix<double> sp = m.to_sparse();
    std::vector<std::tuple<int, int, double>> coords;
    coords.reserve(sp.nonZeros());
    for (int k = 0; k < sp.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(sp, k); it; ++it)
            coords.emplace_back(it.row(), it.col(), it.value());
    std::sort(coords.begin(), coords.end(),
              [](const auto& a, const auto& b) {
                  return std::pair{std::get<0>(a), std::get<1>(a)} <
                         std::pair{std::get<0>(b), std::get<1>(b)};
              });
    char buf[96];
    for (const auto& [r, c, v] : coords) {
        std::snprintf(buf, sizeof buf, "%d %d %.17g\n", r, c, v);
        out << buf;
    }
}

namespace {

/// Per-element quadrature context: basis values and physical gradients of
/// the degree-5 rule, plus dof gathers.
struct ElementContext {
    std::array<int, 6> p2;   // scalar P2 dofs
    std::array<int, 3> p1;   // vertex (pressure) dofs
    ElementGeometry geom;
};

ElementContext element_context(const Mesh& mesh, const DofMap& dofs, int t) {
    ElementContext ctx;
    const auto& tri = mesh.triangles[t];
    ctx.p2 = dofs.p2_dofs(mesh, t);
    ctx.p1 = {tri[0], tri[1], tri[2]};
    ctx.geom = element_geometry(mesh.nodes[tri[0]], mesh.nodes[tri[1]],
                                mesh.nodes[tri[2]]);
    return ctx;
}

/// Runs `kernel(t)` over all elements, either serially or with OpenMP. The
/// kernel writes into per-element storage only, so the schedule cannot
/// change results.
template <class Kernel>
void for_each_element(int n_elements, Exec exec, const Kernel& kernel) {
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (int t = 0; t < n_elements; ++t) kernel(t);
    } else {
        for (int t = 0; t < n_elements; ++t) kernel(t);
    }
}

// ---------------------------------------------------------------------------
// Constant forms
// ---------------------------------------------------------------------------

struct ConstantFormBlocks {
    std::array<std::array<double, 6>, 6> stiff{};   // grad Ni . grad Nj
    std::array<std::array<double, 6>, 6> mass22{};  // Ni Nj (P2 x P2)
    std::array<std::array<double, 6>, 3> div_u{};   // P1_q dNj/dx
    std::array<std::array<double, 6>, 3> div_v{};   // P1_q dNj/dy
    std::array<double, 3> p1_int{};                 // integral of P1_q
};

void constant_form_blocks(const ElementContext& ctx, ConstantFormBlocks& b) {
    b = ConstantFormBlocks{};
    const double jac = 2.0 * ctx.geom.area;  // reference weights sum to 1/2
    for (const auto& q : triangle_rule(5).points) {
        const double w = q.w * jac;
        const auto n2 = p2_values(q.l0, q.l1, q.l2);
        const auto g2 = p2_grads(q.l0, q.l1, q.l2, ctx.geom);
        const auto n1 = p1_values(q.l0, q.l1, q.l2);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) {
                b.stiff[i][j] += w * (g2[i][0] * g2[j][0] + g2[i][1] * g2[j][1]);
                b.mass22[i][j] += w * n2[i] * n2[j];
            }
        for (int qi = 0; qi < 3; ++qi) {
            b.p1_int[qi] += w * n1[qi];
            for (int j = 0; j < 6; ++j) {
                b.div_u[qi][j] += w * n1[qi] * g2[j][0];
                b.div_v[qi][j] += w * n1[qi] * g2[j][1];
            }
        }
    }
}

} // namespace

LinearForms assemble_linear_forms(const Mesh& mesh, const DofMap& dofs,
                                  const FlowParams& params, Exec exec) {
    const int n_el = mesh.num_triangles();
    const int n2 = dofs.n_p2;
    const double c_visc = params.viscous_coeff();
    const double c_div = params.pressure_coeff();
    const double c_buoy = params.buoyancy_coeff();
    const double c_th = params.thermal_coeff();

    struct Local {
        ConstantFormBlocks blocks;
        ElementContext ctx;
    };
    std::vector<Local> local(n_el);
    for_each_element(n_el, exec, [&](int t) {
        local[t].ctx = element_context(mesh, dofs, t);
        constant_form_blocks(local[t].ctx, local[t].blocks);
    });

    LinearForms forms;
    forms.viscous = {2 * n2, 2 * n2, {}};
    forms.divergence = {dofs.n_p1, 2 * n2, {}};
    forms.buoyancy = {2 * n2, n2, {}};
    forms.thermal = {n2, n2, {}};
    forms.pressure_mass.assign(dofs.n_p1, 0.0);

    for (int t = 0; t < n_el; ++t) {
        const auto& ctx = local[t].ctx;
        const auto& b = local[t].blocks;
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) {
                const double k = c_visc * b.stiff[i][j];
                forms.viscous.entries.emplace_back(ctx.p2[i], ctx.p2[j], k);
                forms.viscous.entries.emplace_back(n2 + ctx.p2[i], n2 + ctx.p2[j], k);
                forms.buoyancy.entries.emplace_back(n2 + ctx.p2[i], ctx.p2[j],
                                                    c_buoy * b.mass22[i][j]);
                forms.thermal.entries.emplace_back(ctx.p2[i], ctx.p2[j],
                                                   c_th * b.stiff[i][j]);
            }
        for (int q = 0; q < 3; ++q) {
            forms.pressure_mass[ctx.p1[q]] += b.p1_int[q];
            for (int j = 0; j < 6; ++j) {
                forms.divergence.entries.emplace_back(ctx.p1[q], ctx.p2[j],
                                                      c_div * b.div_u[q][j]);
                forms.divergence.entries.emplace_back(ctx.p1[q], n2 + ctx.p2[j],
                                                      c_div * b.div_v[q][j]);
            }
        }
    }
    return forms;
}

// ---------------------------------------------------------------------------
// Convective operators
// ---------------------------------------------------------------------------

namespace {

/// Shared kernel for the trilinear-form operators. Mode selects which slot
/// of a1/a4 carries the unknown.
enum class ConvMode {
    TransportVelocity,   // u -> a1(w; u, .),  w fixed velocity
    LinearizeVelocity,   // dw -> a1(dw; u, .), u fixed velocity
    TransportTemp,       // T -> a4(w; T, .),  w fixed velocity
    LinearizeTempVel     // dw -> a4(dw; T, .), T fixed temperature
};

SparseTriplets assemble_conv_like(const Mesh& mesh, const DofMap& dofs,
                                  const Eigen::VectorXd& field, ConvMode mode,
                                  Exec exec) {
    const int n_el = mesh.num_triangles();
    const int n2 = dofs.n_p2;

    const bool field_is_temperature = mode == ConvMode::LinearizeTempVel;
    const Eigen::Index want = field_is_temperature ? n2 : 2 * n2;
    if (field.size() != want)
        throw std::invalid_argument("coefficient vector has wrong size");

    // blk[0]: transport block (shared by both components / temperature).
    // blk[1..4]: (row-component x column-slot) blocks of the linearized
    // operators, weighted by the gradient of the fixed field.
    struct Local {
        ElementContext ctx;
        double blk[5][6][6];
    };
    std::vector<Local> local(n_el);

    for_each_element(n_el, exec, [&](int t) {
        Local& L = local[t];
        L.ctx = element_context(mesh, dofs, t);
        for (auto& m : L.blk)
            for (auto& row : m)
                for (double& v : row) v = 0.0;

        double cu[6] = {0}, cv[6] = {0};
        for (int k = 0; k < 6; ++k) {
            const int d = L.ctx.p2[k];
            cu[k] = field[d];
            if (!field_is_temperature) cv[k] = field[n2 + d];
        }

        const double jac = 2.0 * L.ctx.geom.area;
        for (const auto& q : triangle_rule(5).points) {
            const double w = q.w * jac;
            const auto n2v = p2_values(q.l0, q.l1, q.l2);
            const auto g2 = p2_grads(q.l0, q.l1, q.l2, L.ctx.geom);

            if (mode == ConvMode::TransportVelocity ||
                mode == ConvMode::TransportTemp) {
                double wx = 0.0, wy = 0.0;
                for (int k = 0; k < 6; ++k) {
                    wx += cu[k] * n2v[k];
                    wy += cv[k] * n2v[k];
                }
                for (int i = 0; i < 6; ++i)
                    for (int j = 0; j < 6; ++j)
                        L.blk[0][i][j] +=
                            w * (wx * g2[j][0] + wy * g2[j][1]) * n2v[i];
            } else {
                // Gradient of the fixed field at this quadrature point.
                double fx0 = 0.0, fy0 = 0.0, fx1 = 0.0, fy1 = 0.0;
                for (int k = 0; k < 6; ++k) {
                    fx0 += cu[k] * g2[k][0];
                    fy0 += cu[k] * g2[k][1];
                    fx1 += cv[k] * g2[k][0];
                    fy1 += cv[k] * g2[k][1];
                }
                for (int i = 0; i < 6; ++i)
                    for (int j = 0; j < 6; ++j) {
                        const double base = w * n2v[j] * n2v[i];
                        L.blk[1][i][j] += base * fx0;  // row comp 0, col U
                        L.blk[2][i][j] += base * fy0;  // row comp 0, col V
                        L.blk[3][i][j] += base * fx1;  // row comp 1, col U
                        L.blk[4][i][j] += base * fy1;  // row comp 1, col V
                    }
            }
        }
    });

    SparseTriplets out;
    out.rows = (mode == ConvMode::TransportVelocity ||
                mode == ConvMode::LinearizeVelocity)
                   ? 2 * n2
                   : n2;
    out.cols = (mode == ConvMode::TransportTemp) ? n2 : 2 * n2;
    if (mode == ConvMode::TransportVelocity) out.cols = 2 * n2;

    for (int t = 0; t < n_el; ++t) {
        const auto& L = local[t];
        const auto& d = L.ctx.p2;
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) {
                switch (mode) {
                    case ConvMode::TransportVelocity:
                        out.entries.emplace_back(d[i], d[j], L.blk[0][i][j]);
                        out.entries.emplace_back(n2 + d[i], n2 + d[j],
                                                 L.blk[0][i][j]);
                        break;
                    case ConvMode::TransportTemp:
                        out.entries.emplace_back(d[i], d[j], L.blk[0][i][j]);
                        break;
                    case ConvMode::LinearizeVelocity:
                        out.entries.emplace_back(d[i], d[j], L.blk[1][i][j]);
                        out.entries.emplace_back(d[i], n2 + d[j], L.blk[2][i][j]);
                        out.entries.emplace_back(n2 + d[i], d[j], L.blk[3][i][j]);
                        out.entries.emplace_back(n2 + d[i], n2 + d[j],
                                                 L.blk[4][i][j]);
                        break;
                    case ConvMode::LinearizeTempVel:
                        out.entries.emplace_back(d[i], d[j], L.blk[1][i][j]);
                        out.entries.emplace_back(d[i], n2 + d[j], L.blk[2][i][j]);
                        break;
                }
            }
    }
    return out;
}

} // namespace

SparseTriplets assemble_convection(const Mesh& mesh, const DofMap& dofs,
                                   const Eigen::VectorXd& w, Exec exec) {
    return assemble_conv_like(mesh, dofs, w, ConvMode::TransportVelocity, exec);
}

SparseTriplets assemble_convection_linearized(const Mesh& mesh,
                                              const DofMap& dofs,
                                              const Eigen::VectorXd& u,
                                              Exec exec) {
    return assemble_conv_like(mesh, dofs, u, ConvMode::LinearizeVelocity, exec);
}

SparseTriplets assemble_thermal_advection(const Mesh& mesh, const DofMap& dofs,
                                          const Eigen::VectorXd& w, Exec exec) {
    return assemble_conv_like(mesh, dofs, w, ConvMode::TransportTemp, exec);
}

SparseTriplets assemble_thermal_advection_linearized(
    const Mesh& mesh, const DofMap& dofs, const Eigen::VectorXd& temperature,
    Exec exec) {
    return assemble_conv_like(mesh, dofs, temperature,
                              ConvMode::LinearizeTempVel, exec);
}

// ---------------------------------------------------------------------------
// Fused Newton assembly
// ---------------------------------------------------------------------------

namespace {

/// All Jacobian blocks and residual rows of one element. Momentum U rows
/// carry no temperature coupling because the buoyancy direction is (0,1).
struct NewtonLocal {
    ElementContext ctx;
    std::array<std::array<double, 6>, 6> Juu{}, Juv{}, Jvu{}, Jvv{}, Jvt{},
        Jtt{}, Jtu{}, Jtv{};
    std::array<std::array<double, 3>, 6> Jup{}, Jvp{};
    std::array<std::array<double, 6>, 3> Jpu{}, Jpv{};
    std::array<double, 6> ru{}, rv{}, rt{};
    std::array<double, 3> rp{}, m{};
};

void newton_element(const Mesh& mesh, const DofMap& dofs,
                    const FlowParams& params, const Eigen::VectorXd& state,
                    const Forcing* forcing, bool freeze_convection, int t,
                    bool want_jacobian, NewtonLocal& L) {
    L = NewtonLocal{};
    L.ctx = element_context(mesh, dofs, t);

    const int n2 = dofs.n_p2;
    const int off_t = dofs.offset_t();
    const int off_p = dofs.offset_p();
    const double c_visc = params.viscous_coeff();
    const double c_div = params.pressure_coeff();
    const double c_buoy = params.buoyancy_coeff();
    const double c_th = params.thermal_coeff();

    double ul[6], vl[6], tl[6], pl[3];
    for (int k = 0; k < 6; ++k) {
        const int d = L.ctx.p2[k];
        ul[k] = state[d];
        vl[k] = state[n2 + d];
        tl[k] = state[off_t + d];
    }
    for (int k = 0; k < 3; ++k) pl[k] = state[off_p + L.ctx.p1[k]];

    const double jac = 2.0 * L.ctx.geom.area;
    for (const auto& q : triangle_rule(5).points) {
        const double w = q.w * jac;
        const auto n2v = p2_values(q.l0, q.l1, q.l2);
        const auto g2 = p2_grads(q.l0, q.l1, q.l2, L.ctx.geom);
        const auto n1 = p1_values(q.l0, q.l1, q.l2);

        double u = 0, v = 0, temp = 0, ux = 0, uy = 0, vx = 0, vy = 0, tx = 0,
               ty = 0;
        for (int k = 0; k < 6; ++k) {
            u += ul[k] * n2v[k];
            v += vl[k] * n2v[k];
            temp += tl[k] * n2v[k];
            ux += ul[k] * g2[k][0];
            uy += ul[k] * g2[k][1];
            vx += vl[k] * g2[k][0];
            vy += vl[k] * g2[k][1];
            tx += tl[k] * g2[k][0];
            ty += tl[k] * g2[k][1];
        }
        double p = 0;
        for (int k = 0; k < 3; ++k) p += pl[k] * n1[k];

        double fx = 0, fy = 0, fe = 0;
        if (forcing) {
            double x = 0, y = 0;
            const auto& tri = mesh.triangles[t];
            x = q.l0 * mesh.nodes[tri[0]].x + q.l1 * mesh.nodes[tri[1]].x +
                q.l2 * mesh.nodes[tri[2]].x;
            y = q.l0 * mesh.nodes[tri[0]].y + q.l1 * mesh.nodes[tri[1]].y +
                q.l2 * mesh.nodes[tri[2]].y;
            if (forcing->momentum_x) fx = forcing->momentum_x(x, y);
            if (forcing->momentum_y) fy = forcing->momentum_y(x, y);
            if (forcing->energy) fe = forcing->energy(x, y);
        }

        const double conv_u = u * ux + v * uy;
        const double conv_v = u * vx + v * vy;
        const double conv_t = u * tx + v * ty;
        const double div_u = ux + vy;

        for (int i = 0; i < 6; ++i) {
            const double Ni = n2v[i];
            const double gx = g2[i][0], gy = g2[i][1];
            L.ru[i] += w * (c_visc * (ux * gx + uy * gy) + conv_u * Ni -
                            c_div * p * gx - fx * Ni);
            L.rv[i] += w * (c_visc * (vx * gx + vy * gy) + conv_v * Ni -
                            c_div * p * gy - c_buoy * temp * Ni - fy * Ni);
            L.rt[i] += w * (c_th * (tx * gx + ty * gy) + conv_t * Ni - fe * Ni);
        }
        for (int qi = 0; qi < 3; ++qi) {
            L.rp[qi] += w * c_div * div_u * n1[qi];
            L.m[qi] += w * n1[qi];
        }

        if (!want_jacobian) continue;

        for (int i = 0; i < 6; ++i) {
            const double Ni = n2v[i];
            const double gx = g2[i][0], gy = g2[i][1];
            for (int j = 0; j < 6; ++j) {
                const double Nj = n2v[j];
                const double diff =
                    c_visc * (g2[j][0] * gx + g2[j][1] * gy);
                const double transport =
                    (u * g2[j][0] + v * g2[j][1]) * Ni;  // frozen-w branch
                L.Juu[i][j] += w * (diff + transport);
                L.Jvv[i][j] += w * (diff + transport);
                L.Jtt[i][j] += w * (c_th * (g2[j][0] * gx + g2[j][1] * gy) +
                                    transport);
                L.Jvt[i][j] += w * (-c_buoy * Nj * Ni);
                if (!freeze_convection) {
                    const double base = w * Nj * Ni;
                    L.Juu[i][j] += base * ux;
                    L.Juv[i][j] += base * uy;
                    L.Jvu[i][j] += base * vx;
                    L.Jvv[i][j] += base * vy;
                    L.Jtu[i][j] += base * tx;
                    L.Jtv[i][j] += base * ty;
                }
            }
            for (int qj = 0; qj < 3; ++qj) {
                L.Jup[i][qj] += w * (-c_div * n1[qj] * gx);
                L.Jvp[i][qj] += w * (-c_div * n1[qj] * gy);
            }
        }
        for (int qi = 0; qi < 3; ++qi)
            for (int j = 0; j < 6; ++j) {
                L.Jpu[qi][j] += w * c_div * g2[j][0] * n1[qi];
                L.Jpv[qi][j] += w * c_div * g2[j][1] * n1[qi];
            }
    }
}

} // namespace

AssembledSystem assemble_newton_system(const Mesh& mesh, const DofMap& dofs,
                                       const FlowParams& params,
                                       const Eigen::VectorXd& full_state,
                                       const Forcing* forcing,
                                       bool freeze_convection, Exec exec) {
    if (full_state.size() != dofs.n_full())
        throw std::invalid_argument("state vector does not match the dof map");

    const int n_el = mesh.num_triangles();
    const int off_v = dofs.offset_v();
    const int off_t = dofs.offset_t();
    const int off_p = dofs.offset_p();
    const int mult_full = dofs.multiplier_index();
    const double lambda = full_state[mult_full];

    std::vector<NewtonLocal> local(n_el);
    for_each_element(n_el, exec, [&](int t) {
        newton_element(mesh, dofs, params, full_state, forcing,
                       freeze_convection, t, /*want_jacobian=*/true, local[t]);
    });

    Eigen::VectorXd residual = Eigen::VectorXd::Zero(dofs.n_free);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(n_el) * 420);
    const auto& f2f = dofs.full_to_free;
    const int mult = f2f[mult_full];

    auto add = [&](int r, int c, double v) {
        if (r >= 0 && c >= 0) trip.emplace_back(r, c, v);
    };

    for (int t = 0; t < n_el; ++t) {
        const auto& L = local[t];
        int fu[6], fv[6], ft[6], fp[3];
        for (int k = 0; k < 6; ++k) {
            fu[k] = f2f[L.ctx.p2[k]];
            fv[k] = f2f[off_v + L.ctx.p2[k]];
            ft[k] = f2f[off_t + L.ctx.p2[k]];
        }
        for (int k = 0; k < 3; ++k) fp[k] = f2f[off_p + L.ctx.p1[k]];

        for (int i = 0; i < 6; ++i) {
            if (fu[i] >= 0) residual[fu[i]] += L.ru[i];
            if (fv[i] >= 0) residual[fv[i]] += L.rv[i];
            if (ft[i] >= 0) residual[ft[i]] += L.rt[i];
            for (int j = 0; j < 6; ++j) {
                add(fu[i], fu[j], L.Juu[i][j]);
                add(fu[i], fv[j], L.Juv[i][j]);
                add(fv[i], fu[j], L.Jvu[i][j]);
                add(fv[i], fv[j], L.Jvv[i][j]);
                add(fv[i], ft[j], L.Jvt[i][j]);
                add(ft[i], ft[j], L.Jtt[i][j]);
                add(ft[i], fu[j], L.Jtu[i][j]);
                add(ft[i], fv[j], L.Jtv[i][j]);
            }
            for (int qj = 0; qj < 3; ++qj) {
                add(fu[i], fp[qj], L.Jup[i][qj]);
                add(fv[i], fp[qj], L.Jvp[i][qj]);
            }
        }
        for (int qi = 0; qi < 3; ++qi) {
            // Continuity rows plus the mean-pressure coupling; pressure is
            // never Dirichlet so fp is always valid.
            residual[fp[qi]] += L.rp[qi] + lambda * L.m[qi];
            residual[mult] += L.m[qi] * full_state[off_p + L.ctx.p1[qi]];
            for (int j = 0; j < 6; ++j) {
                add(fp[qi], fu[j], L.Jpu[qi][j]);
                add(fp[qi], fv[j], L.Jpv[qi][j]);
            }
            add(fp[qi], mult, L.m[qi]);
            add(mult, fp[qi], L.m[qi]);
        }
    }

    AssembledSystem sys;
    sys.jacobian.resize(dofs.n_free, dofs.n_free);
    sys.jacobian.setFromTriplets(trip.begin(), trip.end());
    sys.residual = std::move(residual);
    return sys;
}

Eigen::VectorXd assemble_residual(const Mesh& mesh, const DofMap& dofs,
                                  const FlowParams& params,
                                  const Eigen::VectorXd& full_state,
                                  const Forcing* forcing, Exec exec) {
    if (full_state.size() != dofs.n_full())
        throw std::invalid_argument("state vector does not match the dof map");

    const int n_el = mesh.num_triangles();
    const int off_v = dofs.offset_v();
    const int off_t = dofs.offset_t();
    const int off_p = dofs.offset_p();
    const double lambda = full_state[dofs.multiplier_index()];

    std::vector<NewtonLocal> local(n_el);
    for_each_element(n_el, exec, [&](int t) {
        newton_element(mesh, dofs, params, full_state, forcing,
                       /*freeze_convection=*/true, t, /*want_jacobian=*/false,
                       local[t]);
    });

    Eigen::VectorXd residual = Eigen::VectorXd::Zero(dofs.n_free);
    const auto& f2f = dofs.full_to_free;
    const int mult = f2f[dofs.multiplier_index()];
    for (int t = 0; t < n_el; ++t) {
        const auto& L = local[t];
        for (int i = 0; i < 6; ++i) {
            const int fu = f2f[L.ctx.p2[i]];
            const int fv = f2f[off_v + L.ctx.p2[i]];
            const int ft = f2f[off_t + L.ctx.p2[i]];
            if (fu >= 0) residual[fu] += L.ru[i];
            if (fv >= 0) residual[fv] += L.rv[i];
            if (ft >= 0) residual[ft] += L.rt[i];
        }
        for (int qi = 0; qi < 3; ++qi) {
            residual[f2f[off_p + L.ctx.p1[qi]]] += L.rp[qi] + lambda * L.m[qi];
            residual[mult] += L.m[qi] * full_state[off_p + L.ctx.p1[qi]];
        }
    }
    return residual;
}

// ---------------------------------------------------------------------------
// Scalar Poisson helper
// ---------------------------------------------------------------------------

Eigen::VectorXd solve_scalar_poisson(
    const Mesh& mesh, const DofMap& dofs,
    const std::vector<std::uint8_t>& dirichlet_mask,
    const std::vector<double>& dirichlet_values, double coeff,
    const QuadDensity& rhs_density, Exec exec) {
    const int n2 = dofs.n_p2;
    if (static_cast<int>(dirichlet_mask.size()) != n2 ||
        static_cast<int>(dirichlet_values.size()) != n2)
        throw std::invalid_argument("Dirichlet data does not match the dof map");

    std::vector<int> free_of(n2, -1);
    int n_free = 0;
    for (int i = 0; i < n2; ++i)
        if (!dirichlet_mask[i]) free_of[i] = n_free++;

    struct Local {
        ElementContext ctx;
        std::array<std::array<double, 6>, 6> K{};
        std::array<double, 6> rhs{};
    };
    const int n_el = mesh.num_triangles();
    std::vector<Local> local(n_el);
    for_each_element(n_el, exec, [&](int t) {
        Local& L = local[t];
        L = Local{};
        L.ctx = element_context(mesh, dofs, t);
        const auto& tri = mesh.triangles[t];
        const double jac = 2.0 * L.ctx.geom.area;
        for (const auto& q : triangle_rule(5).points) {
            const double w = q.w * jac;
            const auto n2v = p2_values(q.l0, q.l1, q.l2);
            const auto g2 = p2_grads(q.l0, q.l1, q.l2, L.ctx.geom);
            double rho = 0.0;
            if (rhs_density) {
                const double x = q.l0 * mesh.nodes[tri[0]].x +
                                 q.l1 * mesh.nodes[tri[1]].x +
                                 q.l2 * mesh.nodes[tri[2]].x;
                const double y = q.l0 * mesh.nodes[tri[0]].y +
                                 q.l1 * mesh.nodes[tri[1]].y +
                                 q.l2 * mesh.nodes[tri[2]].y;
                rho = rhs_density(t, q.l0, q.l1, q.l2, x, y);
            }
            for (int i = 0; i < 6; ++i) {
                L.rhs[i] += w * rho * n2v[i];
                for (int j = 0; j < 6; ++j)
                    L.K[i][j] += w * coeff *
                                 (g2[i][0] * g2[j][0] + g2[i][1] * g2[j][1]);
            }
        }
    });

    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_free);
    for (int t = 0; t < n_el; ++t) {
        const auto& L = local[t];
        for (int i = 0; i < 6; ++i) {
            const int fi = free_of[L.ctx.p2[i]];
            if (fi < 0) continue;
            rhs[fi] += L.rhs[i];
            for (int j = 0; j < 6; ++j) {
                const int dj = L.ctx.p2[j];
                if (free_of[dj] >= 0)
                    trip.emplace_back(fi, free_of[dj], L.K[i][j]);
                else
                    rhs[fi] -= L.K[i][j] * dirichlet_values[dj];
            }
        }
    }

    Eigen::SparseMatrix<double> K(n_free, n_free);
    K.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
    if (ldlt.info() != Eigen::Success)
        throw SingularSystemError("scalar Poisson factorization failed");
    const Eigen::VectorXd sol = ldlt.solve(rhs);

    Eigen::VectorXd full(n2);
    for (int i = 0; i < n2; ++i)
        full[i] = dirichlet_mask[i] ? dirichlet_values[i] : sol[free_of[i]];
    return full;
}

} // namespace hnconv
