// Copyright (c) 2026 The MINet-cpp Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "reference_net.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace minet::testing {

namespace {

using Store = ad::ParamStore<double>;

const Tensor4<double>& P(const Store& s, const std::string& name) { return s.get(name).value; }

RefImage add(const RefImage& a, const RefImage& b) {
  RefImage o = a;
  for (std::size_t i = 0; i < o.v.size(); ++i) o.v[i] += b.v[i];
  return o;
}

RefImage relu(RefImage a) {
  for (double& x : a.v) x = x > 0 ? x : 0;
  return a;
}

RefImage sigmoid(RefImage a) {
  for (double& x : a.v) x = 1.0 / (1.0 + std::exp(-x));
  return a;
}

RefImage bn(const RefImage& in, const Store& p, const Store& b, const std::string& name) {
  RefImage o = in;
  const auto& g = P(p, name + ".gamma");
  const auto& be = P(p, name + ".beta");
  const auto& m = P(b, name + ".running_mean");
  const auto& v = P(b, name + ".running_var");
  for (int ch = 0; ch < in.c; ++ch) {
    const double inv = 1.0 / std::sqrt(v.data()[ch] + 1e-5);
    for (int y = 0; y < in.h; ++y)
      for (int x = 0; x < in.w; ++x)
        o.at(ch, y, x) = (in.at(ch, y, x) - m.data()[ch]) * inv * g.data()[ch] + be.data()[ch];
  }
  return o;
}

RefImage conv_named(const RefImage& in, const Store& p, const std::string& name, int stride,
                    int dilation, int pad, int groups) {
  const Tensor4<double>* bias = p.contains(name + ".bias") ? &P(p, name + ".bias") : nullptr;
  return ref_conv(in, P(p, name + ".weight"), bias, stride, dilation, pad, groups);
}

RefImage dsconv(const RefImage& in, const Store& p, const Store& b, const std::string& name,
                int stride, int dilation) {
  RefImage y = conv_named(in, p, name + ".dw", stride, dilation, dilation, in.c);
  y = relu(bn(y, p, b, name + ".dw_bn"));
  y = conv_named(y, p, name + ".pw", 1, 1, 0, 1);
  return relu(bn(y, p, b, name + ".pw_bn"));
}

RefImage concat(const std::vector<RefImage>& parts) {
  RefImage o(0, parts[0].h, parts[0].w);
  for (const auto& q : parts) {
    o.c += q.c;
    o.v.insert(o.v.end(), q.v.begin(), q.v.end());
  }
  return o;
}

RefImage interleave(const std::vector<RefImage>& four) {
  const int c = four[0].c;
  RefImage o(4 * c, four[0].h, four[0].w);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < 4; ++i)
      for (int y = 0; y < o.h; ++y)
        for (int x = 0; x < o.w; ++x) o.at(4 * j + i, y, x) = four[i].at(j, y, x);
  return o;
}

RefImage mi(const RefImage& x, const Store& p, const std::string& pre, MIVariant v) {
  const int c = x.c;
  const int dil[4] = {1, 2, 4, 8};
  std::vector<RefImage> br;
  RefImage fused;
  const bool uniform = v == MIVariant::UniformDilation;
  if (v == MIVariant::ConcatDSConv || v == MIVariant::SumDSConv) {
    for (int i = 0; i < 4; ++i) {
      const std::string b = pre + ".branch" + std::to_string(i + 1);
      RefImage y = conv_named(x, p, b + ".dw", 1, dil[i], dil[i], c);
      br.push_back(conv_named(y, p, b + ".pw", 1, 1, 0, 1));
    }
    if (v == MIVariant::ConcatDSConv) {
      fused = conv_named(concat(br), p, pre + ".reduce", 1, 1, 0, 1);
    } else {
      fused = add(add(add(br[0], br[1]), br[2]), br[3]);
    }
  } else {
    for (int i = 0; i < 4; ++i) {
      const int d = uniform ? 1 : dil[i];
      br.push_back(conv_named(x, p, pre + ".dw" + std::to_string(i + 1), 1, d, d, c));
    }
    if (v == MIVariant::SumFusion) {
      fused = conv_named(add(add(add(br[0], br[1]), br[2]), br[3]), p, pre + ".mix", 1, 1, 0, 1);
    } else {
      RefImage f = conv_named(interleave(br), p, pre + ".fuse", 1, 1, 0, c);
      fused = v == MIVariant::NoChannelInteraction ? conv_named(f, p, pre + ".scale", 1, 1, 0, c)
                                                   : conv_named(f, p, pre + ".mix", 1, 1, 0, 1);
    }
  }
  return relu(add(fused, x));
}

}  // namespace

RefImage to_ref(const Tensor4<double>& t) {
  RefImage r(t.c(), t.h(), t.w());
  std::copy(t.data(), t.data() + r.v.size(), r.v.begin());
  return r;
}

RefImage ref_conv(const RefImage& in, const Tensor4<double>& weight, const Tensor4<double>* bias,
                  int stride, int dilation, int pad, int groups) {
  const int co = weight.n(), cig = weight.c(), k = weight.h();
  const int oh = (in.h + 2 * pad - dilation * (k - 1) - 1) / stride + 1;
  const int ow = (in.w + 2 * pad - dilation * (k - 1) - 1) / stride + 1;
  const int cog = co / groups;
  RefImage o(co, oh, ow);
  for (int oc = 0; oc < co; ++oc) {
    const int g = oc / cog;
    for (int oy = 0; oy < oh; ++oy)
      for (int ox = 0; ox < ow; ++ox) {
        double acc = bias ? bias->data()[oc] : 0.0;
        for (int ic = 0; ic < cig; ++ic)
          for (int ky = 0; ky < k; ++ky)
            for (int kx = 0; kx < k; ++kx) {
              const int iy = oy * stride - pad + ky * dilation;
              const int ix = ox * stride - pad + kx * dilation;
              if (iy < 0 || iy >= in.h || ix < 0 || ix >= in.w) continue;
              acc += weight(oc, ic, ky, kx) * in.at(g * cig + ic, iy, ix);
            }
        o.at(oc, oy, ox) = acc;
      }
  }
  return o;
}

RefImage ref_resize(const RefImage& in, int oh, int ow) {
  RefImage o(in.c, oh, ow);
  auto src = [](int d, int n_in, int n_out, int& i0, int& i1, double& f) {
    double s = (d + 0.5) * n_in / n_out - 0.5;
    if (s < 0) s = 0;
    i0 = static_cast<int>(s);
    if (i0 > n_in - 1) i0 = n_in - 1;
    i1 = i0 + 1 < n_in ? i0 + 1 : n_in - 1;
    f = s - i0;
  };
  for (int ch = 0; ch < in.c; ++ch)
    for (int y = 0; y < oh; ++y) {
      int y0, y1;
      double fy;
      src(y, in.h, oh, y0, y1, fy);
      for (int x = 0; x < ow; ++x) {
        int x0, x1;
        double fx;
        src(x, in.w, ow, x0, x1, fx);
        const double top = in.at(ch, y0, x0) * (1 - fx) + in.at(ch, y0, x1) * fx;
        const double bot = in.at(ch, y1, x0) * (1 - fx) + in.at(ch, y1, x1) * fx;
        o.at(ch, y, x) = top * (1 - fy) + bot * fy;
      }
    }
  return o;
}

std::array<RefImage, 5> reference_backbone(const Network<double>& net, const RefImage& x) {
  const Store& p = net.params();
  const Store& b = net.buffers();
  const auto& cfg = net.config();
  std::array<RefImage, 5> f;
  f[0] = relu(bn(conv_named(x, p, "stage1.conv", 2, 1, 1, 1), p, b, "stage1.bn"));
  for (int s = 2; s <= 5; ++s) {
    const std::string st = "stage" + std::to_string(s);
    RefImage y = dsconv(f[s - 2], p, b, st + ".down", 2, 1);
    for (int j = 1; j <= cfg.mi_counts[s - 2]; ++j) {
      y = mi(y, p, st + ".mi" + std::to_string(j), cfg.variant);
    }
    f[s - 1] = y;
  }
  return f;
}

std::array<RefImage, 5> reference_forward(const Network<double>& net, const RefImage& x) {
  const Store& p = net.params();
  const Store& b = net.buffers();
  const auto f = reference_backbone(net, x);
  std::array<RefImage, 5> d;
  for (int i = 5; i >= 1; --i) {
    RefImage in = f[i - 1];
    if (i < 5) in = add(in, ref_resize(d[i], in.h, in.w));
    const std::string dn = "decoder" + std::to_string(i);
    d[i - 1] = dsconv(dsconv(in, p, b, dn + ".ds1", 1, 2), p, b, dn + ".ds2", 1, 1);
  }
  std::array<RefImage, 5> s;
  for (int i = 1; i <= 5; ++i) {
    RefImage y = sigmoid(conv_named(d[i - 1], p, "head" + std::to_string(i) + ".conv", 1, 1, 0, 1));
    s[i - 1] = ref_resize(y, x.h, x.w);
  }
  return s;
}

}  // namespace minet::testing
