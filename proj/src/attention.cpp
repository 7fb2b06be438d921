#include "oneshot/attention.hpp"

#include <cmath>
#include <stdexcept>

namespace oneshot {

TokenMatrix cross_attention(const TokenMatrix& q, const TokenMatrix& k, const TokenMatrix& v) {
  if (q.cols() != k.cols()) throw std::invalid_argument("cross_attention: Q/K dim mismatch");
  if (k.rows() != v.rows()) throw std::invalid_argument("cross_attention: K/V row mismatch");
  if (k.rows() < 1) throw std::invalid_argument("cross_attention: needs at least one key");
  if (q.cols() < 1) throw std::invalid_argument("cross_attention: dim must be positive");

  MatrixXd logits = q * k.transpose() / std::sqrt(static_cast<double>(q.cols()));
  for (long r = 0; r < logits.rows(); ++r) {
    const double m = logits.row(r).maxCoeff();
    logits.row(r) = (logits.row(r).array() - m).exp();
    logits.row(r) /= logits.row(r).sum();
  }
  return logits * v;
}

std::pair<TokenMatrix, TokenMatrix> concat_conditioning(const TokenMatrix& txt_k,
                                                        const TokenMatrix& txt_v,
                                                        const TokenMatrix& img_k,
                                                        const TokenMatrix& img_v,
                                                        double lambda_img) {
  if (lambda_img < 0.0) throw std::invalid_argument("concat_conditioning: lambda_img must be >= 0");
  if (txt_k.rows() != txt_v.rows()) throw std::invalid_argument("concat_conditioning: text K/V row mismatch");
  if (img_k.rows() != img_v.rows()) throw std::invalid_argument("concat_conditioning: image K/V row mismatch");
  if (txt_k.rows() > 0 && img_k.rows() > 0 && txt_k.cols() != img_k.cols())
    throw std::invalid_argument("concat_conditioning: key dim mismatch");
  if (txt_v.rows() > 0 && img_v.rows() > 0 && txt_v.cols() != img_v.cols())
    throw std::invalid_argument("concat_conditioning: value dim mismatch");

  const long k_cols = txt_k.rows() > 0 ? txt_k.cols() : img_k.cols();
  const long v_cols = txt_v.rows() > 0 ? txt_v.cols() : img_v.cols();
  TokenMatrix k(txt_k.rows() + img_k.rows(), k_cols);
  TokenMatrix v(txt_v.rows() + img_v.rows(), v_cols);
  if (txt_k.rows() > 0) k.topRows(txt_k.rows()) = txt_k;
  if (img_k.rows() > 0) k.bottomRows(img_k.rows()) = lambda_img * img_k;
  if (txt_v.rows() > 0) v.topRows(txt_v.rows()) = txt_v;
  if (img_v.rows() > 0) v.bottomRows(img_v.rows()) = lambda_img * img_v;
  return {std::move(k), std::move(v)};
}

}  // namespace oneshot
