#include "roctb/action.hpp"

#include "roctb/errors.hpp"

namespace roctb {

ActionFunctional::ActionFunctional(const TimeGrid& grid, const FieldParams& params, Options options)
    : grid_(grid), params_(params), options_(options) {
    const std::size_t n = grid_.segments();
    dt_.resize(n);
    t_mid_.resize(n);
    q_mid_.resize(n);
    q_node_.resize(n + 1);
    for (std::size_t k = 0; k < n; ++k) {
        dt_[k] = grid_.dt(k);
        t_mid_[k] = 0.5 * (grid_[k] + grid_[k + 1]);
        q_mid_[k] = params_.primary(t_mid_[k]);
    }
    for (std::size_t k = 0; k <= n; ++k) q_node_[k] = params_.primary(grid_[k]);
    terms_.resize(n);
    seg_vel_.resize(n);
    seg_force_.resize(n);
}

kernels::SegmentField ActionFunctional::field() const {
    return {grid_.nodes(), dt_, t_mid_, q_mid_, q_node_, params_.mu, params_.m, options_.potential};
}

void ActionFunctional::raise(const kernels::Fault& fault, bool at_nodes) const {
    const auto k = static_cast<std::size_t>(fault.index);
    const double t = at_nodes ? grid_[k] : t_mid_[k];
    throw SingularityError(fault.primary ? Body::Primary : Body::Center, t);
}

double ActionFunctional::value(std::span<const cplx> z) const {
    if (const auto fault = kernels::segment_terms(field(), z, terms_, options_.exec)) raise(fault, false);
    return kernels::ordered_sum(terms_);
}

double ActionFunctional::difference(std::span<const cplx> z_old, std::span<const cplx> z_new) const {
    if (const auto fault = kernels::segment_differences(field(), z_old, z_new, terms_, options_.exec)) {
        raise(fault, false);
    }
    return kernels::ordered_sum(terms_);
}

std::vector<cplx> ActionFunctional::node_gradient(std::span<const cplx> z) const {
    std::vector<cplx> grad(z.size());
    if (const auto fault = kernels::node_gradient(field(), z, seg_vel_, seg_force_, grad, options_.exec)) {
        raise(fault, false);
    }
    return grad;
}

std::vector<double> ActionFunctional::free_gradient(const DiscretePath& path) const {
    return restrict_gradient(path, node_gradient(path.samples()));
}

std::vector<cplx> ActionFunctional::el_residual(std::span<const cplx> z) const {
    std::vector<cplx> out(z.size() - 2);
    if (const auto fault = kernels::el_residual(field(), z, out, options_.exec)) raise(fault, true);
    return out;
}

std::vector<double> restrict_gradient(const DiscretePath& path, std::span<const cplx> node_grad) {
    std::vector<double> g;
    g.reserve(path.free_count());
    const auto ray_component = [](const BoundaryCondition& bc, cplx gz) {
        const cplx e = ray_direction(std::get<Ray>(bc).angle);
        return gz.real() * e.real() + gz.imag() * e.imag();
    };
    if (std::holds_alternative<Ray>(path.left())) g.push_back(ray_component(path.left(), node_grad.front()));
    for (std::size_t k = 1; k + 1 < node_grad.size(); ++k) {
        g.push_back(node_grad[k].real());
        g.push_back(node_grad[k].imag());
    }
    if (std::holds_alternative<Ray>(path.right())) g.push_back(ray_component(path.right(), node_grad.back()));
    return g;
}

double discrete_action(const DiscretePath& path, const FieldParams& params) {
    return ActionFunctional(path.grid(), params).value(path.samples());
}

std::vector<double> action_gradient(const DiscretePath& path, const FieldParams& params) {
    return ActionFunctional(path.grid(), params).free_gradient(path);
}

std::vector<cplx> el_residual(const DiscretePath& path, const FieldParams& params) {
    return ActionFunctional(path.grid(), params).el_residual(path.samples());
}

}  // namespace roctb
