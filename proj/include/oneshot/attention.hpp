#pragma once

#include "oneshot/types.hpp"

#include <utility>

namespace oneshot {

/// Token stack: one row per token, one column per embedding dimension.
using TokenMatrix = MatrixXd;

/// softmax(Q K^T / sqrt(d_k)) V with row-wise max subtraction.
TokenMatrix cross_attention(const TokenMatrix& q, const TokenMatrix& k, const TokenMatrix& v);

/// Row concatenation K = [K_txt; lambda K_img], V = [V_txt; lambda V_img].
/// Text blocks may be empty.
std::pair<TokenMatrix, TokenMatrix> concat_conditioning(const TokenMatrix& txt_k,
                                                        const TokenMatrix& txt_v,
                                                        const TokenMatrix& img_k,
                                                        const TokenMatrix& img_v, double lambda_img);

}  // namespace oneshot
