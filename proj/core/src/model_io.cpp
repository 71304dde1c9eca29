// Copyright 2026 The astoi Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <string>

#include "astoi/binary_io.hpp"
#include "astoi/errors.hpp"
#include "astoi/neural.hpp"

namespace astoi {

namespace {

constexpr char kModelMagic[] = "ASTOI";
constexpr std::uint32_t kModelVersion = 1;
constexpr std::uint32_t kMaxDim = 1u << 20;

Vector ReadVector(BinaryReader& in, Eigen::Index n) {
  Vector v(n);
  in.Doubles(v.data(), static_cast<std::size_t>(n));
  return v;
}

}  // namespace

// Layout after the common header:
//   u8 objective, u32 block_len, u32 layer count,
//   per layer: u32 in, u32 out, u8 activation, u8 has_batch_norm,
//   per layer: weights (row-major), bias, [gamma, beta, running mean, running var].
void SaveModel(const MlpModel& model, const std::filesystem::path& path) {
  BinaryWriter out(std::string_view(kModelMagic, 5), kModelVersion);
  out.U8(static_cast<std::uint8_t>(model.objective));
  out.U32(static_cast<std::uint32_t>(model.block_len));
  out.U32(static_cast<std::uint32_t>(model.layers.size()));
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const DenseLayer& l = model.layers[i];
    out.U32(static_cast<std::uint32_t>(l.weights.cols()));
    out.U32(static_cast<std::uint32_t>(l.weights.rows()));
    out.U8(static_cast<std::uint8_t>(l.activation));
    out.U8(i < model.batch_norm.size() ? 1 : 0);
  }
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const DenseLayer& l = model.layers[i];
    out.RowMajor(l.weights);
    out.Doubles(l.bias.data(), static_cast<std::size_t>(l.bias.size()));
    if (i < model.batch_norm.size()) {
      const BatchNorm& bn = model.batch_norm[i];
      for (const Vector* v : {&bn.gamma, &bn.beta, &bn.running_mean, &bn.running_var}) {
        out.Doubles(v->data(), static_cast<std::size_t>(v->size()));
      }
    }
  }
  out.Save(path);
}

MlpModel LoadModel(const std::filesystem::path& path, int expected_output_dim) {
  BinaryReader in(path, std::string_view(kModelMagic, 5), kModelVersion);
  auto fail = [&](const std::string& why) -> FormatError {
    return FormatError(FormatError::Kind::kMalformed, "model '" + path.string() + "': " + why);
  };

  MlpModel model;
  const std::uint8_t objective = in.U8();
  if (objective > static_cast<std::uint8_t>(Objective::kSpectralMse)) throw fail("unknown objective tag");
  model.objective = static_cast<Objective>(objective);
  model.block_len = static_cast<int>(in.U32());
  const std::uint32_t count = in.U32();
  if (count == 0 || count > 64) throw fail("implausible layer count");

  struct Dims {
    std::uint32_t in, out;
    std::uint8_t act, bn;
  };
  std::vector<Dims> dims(count);
  for (Dims& d : dims) {
    d.in = in.U32();
    d.out = in.U32();
    d.act = in.U8();
    d.bn = in.U8();
    if (d.in == 0 || d.out == 0 || d.in > kMaxDim || d.out > kMaxDim) throw fail("implausible layer size");
    if (d.act > static_cast<std::uint8_t>(Activation::kSigmoid)) throw fail("unknown activation");
  }
  for (std::size_t i = 1; i < dims.size(); ++i) {
    if (dims[i].in != dims[i - 1].out) throw fail("layer dimensions do not chain");
  }
  for (std::size_t i = 0; i < dims.size(); ++i) {
    // Batch norm must cover a prefix of the layers and never the output layer.
    const bool expect_bn = dims[i].bn != 0;
    if (expect_bn && (i + 1 == dims.size() || (i > 0 && dims[i - 1].bn == 0))) {
      throw fail("batch norm on unexpected layer");
    }
  }
  if (expected_output_dim >= 0 && dims.back().out != static_cast<std::uint32_t>(expected_output_dim)) {
    throw FormatError(FormatError::Kind::kDimension,
                      "model '" + path.string() + "' has output dimension " + std::to_string(dims.back().out) +
                          ", expected " + std::to_string(expected_output_dim));
  }
  if (model.block_len <= 0 || dims.back().out % static_cast<std::uint32_t>(model.block_len) != 0) {
    throw fail("block length does not divide the output dimension");
  }

  for (const Dims& d : dims) {
    DenseLayer l;
    l.activation = static_cast<Activation>(d.act);
    l.weights = in.RowMajor(d.out, d.in);
    l.bias = ReadVector(in, d.out);
    model.layers.push_back(std::move(l));
    if (d.bn != 0) {
      BatchNorm bn;
      bn.gamma = ReadVector(in, d.out);
      bn.beta = ReadVector(in, d.out);
      bn.running_mean = ReadVector(in, d.out);
      bn.running_var = ReadVector(in, d.out);
      model.batch_norm.push_back(std::move(bn));
    }
  }
  if (!in.AtEnd()) throw fail("unexpected trailing payload");
  return model;
}

}  // namespace astoi
