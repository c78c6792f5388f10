#pragma once

#include "xsda/nn/ops.hpp"

namespace xsda::nn {

/// Index-map builders for the data-movement patterns behind conv layers.
/// Tables are per-sample and cached by configuration, so their size does not
/// scale with batch. All convolutions use TF-style SAME padding: the output
/// spatial size is ceil(dim/stride) with any asymmetric padding split
/// low-side-first.

struct SamePad {
  int out = 0;
  int pad_beg = 0;
};
SamePad same_pad(int dim, int k, int stride, int dilation);

struct ConvPlan {
  IndexMap cols;  // {N,C,H,W} -> rows (oh,ow) x (c,ki,kj)
  int oh = 0, ow = 0;
};
ConvPlan im2col_plan(int n, int c, int h, int w, int k, int stride, int dilation);

/// rows (oh,ow) x oc -> {N,OC,OH,OW}
IndexMap rows_to_nchw_plan(int n, int oc, int oh, int ow);

struct DwPlan {
  IndexMap cols;  // {N,C,H,W} -> rows (c,oh,ow) x (ki,kj)
  IndexMap wmap;  // {C,KK} broadcast to the same rows
  int oh = 0, ow = 0;
};
DwPlan dwconv_plan(int n, int c, int h, int w, int k, int stride, int dilation);

/// {C} broadcast to {N,C,H,W}
IndexMap channel_broadcast_plan(int n, int c, int h, int w);

/// {W} broadcast across rows to {rows, W}
IndexMap row_broadcast_plan(int64_t rows, int width);

struct DeconvPlan {
  IndexMap pre;      // {N,IC,IH,IW} -> rows (ih,iw) x ic
  IndexMap scatter;  // rows (ih,iw) x (oc,ki,kj) -> {N,OC,OH,OW}
  int oh = 0, ow = 0;
};
DeconvPlan deconv_plan(int n, int ic, int ih, int iw, int oc, int k, int stride);

/// Channel concatenation: two scatter maps into {N, C1+C2, H, W}.
struct ConcatPlan {
  IndexMap a, b;
};
ConcatPlan concat_plan(int n, int c1, int c2, int h, int w);

/// Nearest-neighbor 2x upsampling map {N,C,H,W} -> {N,C,2H,2W}.
IndexMap upsample2x_plan(int n, int c, int h, int w);

/// Constant {n,1} tensor of ones (cached).
Var ones_col(int64_t n);
/// Constant {1,n} tensor of ones (cached).
Var ones_row(int64_t n);

}  // namespace xsda::nn
