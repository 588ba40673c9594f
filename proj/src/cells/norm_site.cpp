// SPDX-License-Identifier: Apache-2.0

#include "atn/cells/norm_site.hpp"

#include <stdexcept>
#include <string>

namespace atn {

NormMode parse_norm_mode(std::string_view text) {
  if (text == "plain") return NormMode::plain;
  if (text == "ln") return NormMode::ln;
  if (text == "atn") return NormMode::atn;
  throw std::invalid_argument("unknown mode '" + std::string(text) +
                              "' (expected plain, ln or atn)");
}

std::string_view to_string(NormMode mode) noexcept {
  switch (mode) {
    case NormMode::plain: return "plain";
    case NormMode::ln: return "ln";
    case NormMode::atn: return "atn";
  }
  return "?";
}

Matrix NormSiteTape::variance(NormMode mode, std::size_t t) const {
  switch (mode) {
    case NormMode::plain: return {};
    case NormMode::ln: return ln.at(t).var;
    case NormMode::atn: return atn.step(t).var;
  }
  return {};
}

Matrix norm_site_forward(NormMode mode, AtnBuffer& buffer, const Matrix& a,
                         const NormParams& params, NormSiteTape* tape) {
  if (tape != nullptr) ++tape->steps;
  switch (mode) {
    case NormMode::plain:
      return a;
    case NormMode::ln: {
      auto fwd = ln_forward(a, params);
      if (tape != nullptr) tape->ln.push_back(std::move(fwd.cache));
      return std::move(fwd.y);
    }
    case NormMode::atn:
      return atn_forward_step(buffer, a, params, tape != nullptr ? &tape->atn : nullptr);
  }
  return a;
}

NormSiteBackward::NormSiteBackward(NormMode mode, const NormSiteTape& tape,
                                   const NormParams& params, bool stop_window_gradient)
    : mode_(mode), tape_(tape), params_(params) {
  if (mode == NormMode::atn) atn_.emplace(tape.atn, params, stop_window_gradient);
  if (mode != NormMode::plain) {
    ln_grads_ = {Matrix(1, params.width()), Matrix(1, params.width())};
  }
}

Matrix NormSiteBackward::step(std::size_t t, const Matrix& dy) {
  switch (mode_) {
    case NormMode::plain:
      return dy;
    case NormMode::ln: {
      auto back = ln_backward(tape_.ln.at(t), dy, params_);
      ln_grads_.dgamma += back.params.dgamma;
      ln_grads_.dbeta += back.params.dbeta;
      return std::move(back.da);
    }
    case NormMode::atn:
      return atn_->step(t, dy);
  }
  return dy;
}

NormParamGrads NormSiteBackward::param_grads() const {
  if (mode_ == NormMode::atn) return atn_->param_grads();
  return ln_grads_;
}

}  // namespace atn
