#include "liesphere/transform.hpp"

#include <cmath>
#include <sstream>

#include "liesphere/errors.hpp"

namespace liesphere {

LieSphereElement LieSphereElement::translation(const Vec<double, 3>& t) {
    LieSphereElement e;
    e.kind = Translation;
    e.vec = t;
    return e;
}
LieSphereElement LieSphereElement::rotation(const std::array<std::array<double, 3>, 3>& R) {
    // orthogonality check to 1e-12
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0;
            for (int k = 0; k < 3; ++k) s += R[k][i] * R[k][j];
            if (std::abs(s - (i == j ? 1.0 : 0.0)) > 1e-12)
                throw SchemaViolation("rotation matrix is not orthogonal");
        }
    LieSphereElement e;
    e.kind = Rotation;
    e.mat = R;
    return e;
}
LieSphereElement LieSphereElement::dilation(double s) {
    if (s == 0.0) throw SchemaViolation("dilation factor must be nonzero");
    LieSphereElement e;
    e.kind = Dilation;
    e.scalar = s;
    return e;
}
LieSphereElement LieSphereElement::inversion(const Vec<double, 3>& c, double radius) {
    if (!(radius > 0)) throw SchemaViolation("inversion radius must be positive");
    LieSphereElement e;
    e.kind = Inversion;
    e.vec = c;
    e.scalar = radius;
    return e;
}
LieSphereElement LieSphereElement::normal_shift(double a) {
    LieSphereElement e;
    e.kind = NormalShift;
    e.scalar = a;
    return e;
}

std::string LieSphereElement::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Translation:
            os << "translation(" << vec[0] << "," << vec[1] << "," << vec[2] << ")";
            break;
        case Rotation: os << "rotation"; break;
        case Dilation: os << "dilation(" << scalar << ")"; break;
        case Inversion:
            os << "inversion(c=" << vec[0] << "," << vec[1] << "," << vec[2]
               << ";rho=" << scalar << ")";
            break;
        case NormalShift: os << "normal_shift(" << scalar << ")"; break;
    }
    return os.str();
}

namespace {

double chart_orientation(const CurvatureLineChart& chart, const Immersion2& imm) {
    // Sign relating the chart normal to cross(r_1, r_2) at a reference point.
    if (!chart.normal) return 1.0;
    const double u = 0.5 * (chart.r1min + chart.r1max);
    const double v = 0.5 * (chart.r2min + chart.r2max);
    const auto n = chart.normal(u, v);
    const auto r = imm.eval(u, v);
    Vec<T2, 3> r1, r2;
    for (int i = 0; i < 3; ++i) {
        r1[i] = r[i].shift(0);
        r2[i] = r[i].shift(1);
    }
    const auto c = cross(r1, r2);
    double dp = 0;
    for (int i = 0; i < 3; ++i) dp += c[i].value() * n[i].value();
    return dp >= 0 ? 1.0 : -1.0;
}

} // namespace

CurvatureLineChart apply_conformal(const CurvatureLineChart& chart,
                                   const LieSphereElement& g) {
    if (!chart.immersion)
        throw MissingField("conformal transforms need a backing immersion");
    const Immersion2& imm = *chart.immersion;
    Immersion2 moved;
    double orient = chart_orientation(chart, imm);
    switch (g.kind) {
        case LieSphereElement::Translation: moved = translated(imm, g.vec); break;
        case LieSphereElement::Rotation: moved = rotated(imm, g.mat); break;
        case LieSphereElement::Dilation:
            moved = dilated(imm, g.scalar);
            if (g.scalar < 0) orient = -orient;
            break;
        case LieSphereElement::Inversion: {
            // Precondition: the surface stays away from the center.
            const Grid2 probe = chart.grid(9, 9);
            double dmin = 1e300, diam = 0.0;
            for (int j = 0; j < probe.ny; ++j)
                for (int i = 0; i < probe.nx; ++i) {
                    const auto p = imm.point(probe.x(i), probe.y(j));
                    double d2 = 0;
                    for (int c = 0; c < 3; ++c)
                        d2 += (p[c] - g.vec[c]) * (p[c] - g.vec[c]);
                    dmin = std::min(dmin, std::sqrt(d2));
                    diam = std::max(diam, std::sqrt(d2));
                }
            if (dmin < 1e-3 * diam)
                throw SingularInversion("surface too close to inversion center");
            moved = inverted(imm, g.vec, g.scalar);
            // An inversion reverses ambient orientation.
            orient = -orient;
            break;
        }
        case LieSphereElement::NormalShift:
            throw SchemaViolation("normal_shift is not a conformal element");
    }
    return chart_from_immersion(moved, chart.r1min, chart.r1max, chart.r2min, chart.r2max,
                                chart.periodic1, chart.periodic2, chart.n1, chart.n2,
                                orient, 1e-5);
}

CurvatureLineChart normal_shift(const CurvatureLineChart& chart, double a) {
    // Offset margin check over a probe grid.
    const Grid2 probe = chart.grid(17, 17);
    for (int j = 0; j < probe.ny; ++j)
        for (int i = 0; i < probe.nx; ++i) {
            const double k1 = chart.k1.value(probe.x(i), probe.y(j));
            const double k2 = chart.k2.value(probe.x(i), probe.y(j));
            if (std::abs(1 - a * k1) < 1e-6 || std::abs(1 - a * k2) < 1e-6)
                throw FocalSingularity("offset distance reaches the focal set");
        }
    CurvatureLineChart out = chart;
    const Field2 k1 = chart.k1, k2 = chart.k2, g11 = chart.g11, g22 = chart.g22;
    auto shift_k = [a](const Field2& k) {
        if (k.is_grid()) {
            GridField2 g = k.grid();
            for (double& v : g.data()) v = v / (1 - a * v);
            return Field2::on_grid(std::move(g));
        }
        return Field2::closed([k, a](double u, double v) {
            const T2 kj = k.jet(u, v);
            return kj / (T2(1.0) - a * kj);
        });
    };
    auto shift_g = [a](const Field2& k, const Field2& g) {
        if (g.is_grid() || k.is_grid()) {
            GridField2 gg = g.grid();
            const auto& gr = gg.grid();
            for (int j = 0; j < gr.ny; ++j)
                for (int i = 0; i < gr.nx; ++i) {
                    const double kv = k.value(gr.x(i), gr.y(j));
                    gg.at(i, j) *= (1 - a * kv) * (1 - a * kv);
                }
            return Field2::on_grid(std::move(gg));
        }
        return Field2::closed([k, g, a](double u, double v) {
            const T2 f = T2(1.0) - a * k.jet(u, v);
            return f * f * g.jet(u, v);
        });
    };
    out.k1 = shift_k(k1);
    out.k2 = shift_k(k2);
    out.g11 = shift_g(k1, g11);
    out.g22 = shift_g(k2, g22);
    if (chart.immersion && chart.normal) {
        const Immersion2 imm = *chart.immersion;
        auto nrm = chart.normal;
        out.immersion = Immersion2{[imm, nrm, a](double u, double v) {
            auto r = imm.eval(u, v);
            const auto n = nrm(u, v);
            for (int i = 0; i < 3; ++i) r[i] += n[i] * a;
            return r;
        }};
        out.normal = nrm; // unit normal is carried along the offset
    }
    return out;
}

CurvatureLineChart apply(const CurvatureLineChart& chart, const LieSphereElement& g) {
    if (g.kind == LieSphereElement::NormalShift) return normal_shift(chart, g.scalar);
    return apply_conformal(chart, g);
}

std::string target_name(InvariantTarget t) {
    switch (t) {
        case InvariantTarget::Quad11: return "eq1.1";
        case InvariantTarget::CubicClass12: return "eq1.2-class";
        case InvariantTarget::WebCurv43: return "eq4.3-curv";
        case InvariantTarget::MobiusForms: return "mobius-forms";
        case InvariantTarget::MobiusQuad: return "mobius-quad";
        case InvariantTarget::LaguerreForms: return "laguerre-forms";
        case InvariantTarget::LaguerreQuad: return "laguerre-quad";
        case InvariantTarget::WillmoreFunctional: return "willmore";
        case InvariantTarget::Lie13Functional: return "eq1.3";
    }
    return "?";
}

namespace {

double rel_dev(double a, double b, double scale) {
    return std::abs(a - b) / (scale + 1e-300);
}

double field_rel_dev(const GridField2& a, const GridField2& b) {
    const double scale = std::max(a.max_abs(), b.max_abs());
    if (scale < 1e-300) return 0.0;
    double worst = 0.0;
    const auto& g = a.grid();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            worst = std::max(worst, std::abs(a.at(i, j) - b.at(i, j)) / scale);
    return worst;
}

struct TargetData {
    bool needs_forms = false, needs_ml = false;
    std::optional<Forms2D> forms;
    std::optional<MobiusLaguerreForms> ml;
    std::optional<double> willmore, lie13;
};

TargetData gather(const CurvatureLineChart& chart, const Grid2& grid,
                  const std::vector<InvariantTarget>& targets) {
    TargetData d;
    for (auto t : targets) {
        switch (t) {
            case InvariantTarget::Quad11:
            case InvariantTarget::CubicClass12:
            case InvariantTarget::WebCurv43: d.needs_forms = true; break;
            case InvariantTarget::MobiusForms:
            case InvariantTarget::MobiusQuad:
            case InvariantTarget::LaguerreForms:
            case InvariantTarget::LaguerreQuad: d.needs_ml = true; break;
            case InvariantTarget::WillmoreFunctional:
                d.willmore = functionals(chart, Functional::Willmore, grid).first;
                break;
            case InvariantTarget::Lie13Functional:
                d.lie13 = functionals(chart, Functional::Lie13, grid).first;
                break;
        }
    }
    if (d.needs_forms) d.forms = lie_forms(chart, grid);
    if (d.needs_ml) d.ml = mobius_laguerre_forms(chart, grid);
    return d;
}

double compare_target(InvariantTarget t, const TargetData& ref, const TargetData& img) {
    switch (t) {
        case InvariantTarget::Quad11:
            return field_rel_dev(ref.forms->quad, img.forms->quad);
        case InvariantTarget::CubicClass12: {
            // Compare conformal representatives pointwise.
            const auto& g = ref.forms->grid;
            const double s1 = std::max(ref.forms->cubic1.max_abs(),
                                       ref.forms->cubic3.max_abs());
            const double s2 = std::max(img.forms->cubic1.max_abs(),
                                       img.forms->cubic3.max_abs());
            double worst = 0.0;
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    const auto r1 = cubic_representative(ref.forms->cubic1.at(i, j),
                                                         ref.forms->cubic3.at(i, j), s1);
                    const auto r2 = cubic_representative(img.forms->cubic1.at(i, j),
                                                         img.forms->cubic3.at(i, j), s2);
                    const double den =
                        std::max({std::abs(r1[0]), std::abs(r1[1]), 1.0});
                    worst = std::max(worst, std::max(std::abs(r1[0] - r2[0]),
                                                     std::abs(r1[1] - r2[1])) /
                                                den);
                }
            return worst;
        }
        case InvariantTarget::WebCurv43: {
            // The curvature may vanish identically (hexagonal webs); compare
            // against the size of the terms it cancels between.
            const double scale = std::max(
                {ref.forms->curv.max_abs(), img.forms->curv.max_abs(),
                 1e-3 * std::max(ref.forms->curv_scale, img.forms->curv_scale)});
            if (scale < 1e-300) return 0.0;
            double worst = 0.0;
            const auto& g = ref.forms->grid;
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i)
                    worst = std::max(worst, std::abs(ref.forms->curv.at(i, j) -
                                                     img.forms->curv.at(i, j)) /
                                                scale);
            return worst;
        }
        case InvariantTarget::MobiusForms:
            return std::max(field_rel_dev(ref.ml->mobius1, img.ml->mobius1),
                            field_rel_dev(ref.ml->mobius2, img.ml->mobius2));
        case InvariantTarget::MobiusQuad:
            return std::max(field_rel_dev(ref.ml->mquad1, img.ml->mquad1),
                            field_rel_dev(ref.ml->mquad2, img.ml->mquad2));
        case InvariantTarget::LaguerreForms:
            return std::max(field_rel_dev(ref.ml->laguerre1, img.ml->laguerre1),
                            field_rel_dev(ref.ml->laguerre2, img.ml->laguerre2));
        case InvariantTarget::LaguerreQuad:
            return std::max(field_rel_dev(ref.ml->lquad1, img.ml->lquad1),
                            field_rel_dev(ref.ml->lquad2, img.ml->lquad2));
        case InvariantTarget::WillmoreFunctional:
            return rel_dev(*ref.willmore, *img.willmore, std::abs(*ref.willmore));
        case InvariantTarget::Lie13Functional:
            return rel_dev(*ref.lie13, *img.lie13,
                           std::max(std::abs(*ref.lie13), 1.0));
    }
    return 0.0;
}

} // namespace

InvarianceReport invariance_report(const CurvatureLineChart& chart,
                                   const std::vector<LieSphereElement>& elements,
                                   const std::vector<InvariantTarget>& targets,
                                   const Grid2& grid) {
    InvarianceReport rep;
    const TargetData ref = gather(chart, grid, targets);
    for (const auto& e : elements) {
        const CurvatureLineChart image = apply(chart, e);
        const TargetData img = gather(image, grid, targets);
        ElementReport er{e, {}};
        for (auto t : targets) {
            const double dev = compare_target(t, ref, img);
            er.targets.push_back({t, dev});
            rep.max_rel_deviation = std::max(rep.max_rel_deviation, dev);
        }
        rep.elements.push_back(std::move(er));
    }
    return rep;
}

std::vector<LieSphereElement> random_elements(const CurvatureLineChart& chart, int count,
                                              unsigned seed, bool conformal_only,
                                              bool shifts_only) {
    if (!chart.immersion) throw MissingField("random elements need an immersion");
    const Immersion2& imm = *chart.immersion;
    const Grid2 probe = chart.grid(9, 9);
    Vec<double, 3> bary{0, 0, 0};
    for (int j = 0; j < probe.ny; ++j)
        for (int i = 0; i < probe.nx; ++i) {
            const auto p = imm.point(probe.x(i), probe.y(j));
            for (int c = 0; c < 3; ++c) bary[c] += p[c];
        }
    for (int c = 0; c < 3; ++c) bary[c] /= probe.size();
    double diam = 0.0, focal = 1e300;
    for (int j = 0; j < probe.ny; ++j)
        for (int i = 0; i < probe.nx; ++i) {
            const auto p = imm.point(probe.x(i), probe.y(j));
            double d2 = 0;
            for (int c = 0; c < 3; ++c) d2 += (p[c] - bary[c]) * (p[c] - bary[c]);
            diam = std::max(diam, 2 * std::sqrt(d2));
            const double k1 = chart.k1.value(probe.x(i), probe.y(j));
            const double k2 = chart.k2.value(probe.x(i), probe.y(j));
            if (std::abs(k1) > 1e-12) focal = std::min(focal, 1.0 / std::abs(k1));
            if (std::abs(k2) > 1e-12) focal = std::min(focal, 1.0 / std::abs(k2));
        }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<LieSphereElement> out;
    auto rand_dir = [&]() {
        Vec<double, 3> d;
        double n2;
        do {
            for (int c = 0; c < 3; ++c) d[c] = 2 * uni(rng) - 1;
            n2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
        } while (n2 < 1e-4 || n2 > 1.0);
        const double n = std::sqrt(n2);
        for (int c = 0; c < 3; ++c) d[c] /= n;
        return d;
    };
    for (int k = 0; k < count; ++k) {
        if (shifts_only || (!conformal_only && k % 2 == 1)) {
            const double a = (uni(rng) - 0.5) * focal;
            out.push_back(LieSphereElement::normal_shift(a));
            continue;
        }
        // Random inversion at 2-5 diameters from the barycenter.
        const auto d = rand_dir();
        const double dist = (2.0 + 3.0 * uni(rng)) * diam;
        Vec<double, 3> c{bary[0] + dist * d[0], bary[1] + dist * d[1],
                         bary[2] + dist * d[2]};
        const double rho = (0.5 + uni(rng)) * diam;
        out.push_back(LieSphereElement::inversion(c, rho));
    }
    return out;
}

} // namespace liesphere
