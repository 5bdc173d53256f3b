// Copyright 2026 The uwarm Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "uwarm/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "uwarm/error.hpp"

namespace uwarm {
namespace {

constexpr char kMagic[8] = {'U', 'W', 'D', 'D', 'P', 'G', 'C', 'K'};

class Writer {
 public:
  void u32(std::uint32_t v) { raw(v, 4); }
  void u64(std::uint64_t v) { raw(v, 8); }
  void i64(std::int64_t v) { raw(static_cast<std::uint64_t>(v), 8); }
  void f64(double v) { raw(std::bit_cast<std::uint64_t>(v), 8); }
  void bytes(const char* p, std::size_t n) { out_.append(p, n); }
  template <typename Derived>
  void array(const Eigen::DenseBase<Derived>& m) {
    // Row-major traversal.
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) f64(m(r, c));
    }
  }
  std::string take() { return std::move(out_); }

 private:
  void raw(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& in) : in_(in) {}
  std::uint32_t u32() { return static_cast<std::uint32_t>(raw(4)); }
  std::uint64_t u64() { return raw(8); }
  std::int64_t i64() { return static_cast<std::int64_t>(raw(8)); }
  double f64() { return std::bit_cast<double>(raw(8)); }
  void expect_magic() {
    need(sizeof(kMagic));
    if (std::memcmp(in_.data() + pos_, kMagic, sizeof(kMagic)) != 0) {
      throw Error(ErrorCode::kIo, "not a uwarm checkpoint");
    }
    pos_ += sizeof(kMagic);
  }
  template <typename Derived>
  void array(Eigen::DenseBase<Derived>& m) {
    need(static_cast<std::size_t>(m.size()) * 8);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = f64();
    }
  }
  bool at_end() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw Error(ErrorCode::kIo, "truncated checkpoint");
  }
  std::uint64_t raw(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  const std::string& in_;
  std::size_t pos_ = 0;
};

void write_network(Writer& w, const MlpParams& p) {
  w.u32(static_cast<std::uint32_t>(p.output_activation));
  w.u32(static_cast<std::uint32_t>(p.layer_sizes.size()));
  for (int s : p.layer_sizes) w.u32(static_cast<std::uint32_t>(s));
  w.i64(p.step_count);
  for (const DenseLayer& l : p.layers) {
    w.array(l.weight);
    w.array(l.bias);
    w.array(l.m_weight);
    w.array(l.v_weight);
    w.array(l.m_bias);
    w.array(l.v_bias);
  }
}

MlpParams read_network(Reader& r) {
  const std::uint32_t act = r.u32();
  if (act > 2) throw Error(ErrorCode::kIo, "bad activation tag");
  const std::uint32_t count = r.u32();
  if (count < 2 || count > 64) throw Error(ErrorCode::kIo, "bad layer count");
  std::vector<int> sizes;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t s = r.u32();
    if (s == 0 || s > (1u << 20)) throw Error(ErrorCode::kIo, "bad layer size");
    sizes.push_back(static_cast<int>(s));
  }
  MlpParams p = make_zero_mlp(sizes, static_cast<Activation>(act));
  p.step_count = r.i64();
  for (DenseLayer& l : p.layers) {
    r.array(l.weight);
    r.array(l.bias);
    r.array(l.m_weight);
    r.array(l.v_weight);
    r.array(l.m_bias);
    r.array(l.v_bias);
  }
  return p;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kArtifactNotFound, path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  // Write then rename so a crash never leaves a half-written checkpoint.
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::filesystem::path meta_path(const std::filesystem::path& path) {
  return path.string() + ".meta";
}

}  // namespace

Checkpoint snapshot(const DdpgAgent& agent) {
  return {agent.hyper(),  agent.train_steps(),   agent.actor(),
          agent.critic(), agent.actor_target(), agent.critic_target()};
}

std::string encode_checkpoint(const Checkpoint& c) {
  Writer w;
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kCheckpointVersion);
  w.f64(c.hyper.lr_actor);
  w.f64(c.hyper.lr_critic);
  w.f64(c.hyper.lr_decay);
  w.i64(c.hyper.lr_decay_steps);
  w.f64(c.hyper.gamma);
  w.f64(c.hyper.tau);
  w.u64(c.hyper.batch);
  w.i64(c.train_steps);
  w.u32(4);
  write_network(w, c.actor);
  write_network(w, c.critic);
  write_network(w, c.actor_target);
  write_network(w, c.critic_target);
  return w.take();
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  r.expect_magic();
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::kIo, "unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint c;
  c.hyper.lr_actor = r.f64();
  c.hyper.lr_critic = r.f64();
  c.hyper.lr_decay = r.f64();
  c.hyper.lr_decay_steps = r.i64();
  c.hyper.gamma = r.f64();
  c.hyper.tau = r.f64();
  c.hyper.batch = r.u64();
  c.train_steps = r.i64();
  if (r.u32() != 4) throw Error(ErrorCode::kIo, "expected four networks");
  c.actor = read_network(r);
  c.critic = read_network(r);
  c.actor_target = read_network(r);
  c.critic_target = read_network(r);
  if (!r.at_end()) throw Error(ErrorCode::kIo, "trailing bytes in checkpoint");
  if (!c.actor.same_shape(c.actor_target) || !c.critic.same_shape(c.critic_target)) {
    throw Error(ErrorCode::kShapeMismatch, "target networks differ from online networks");
  }
  return c;
}

void save_checkpoint(const Checkpoint& ckpt, const CheckpointMeta& meta,
                     const std::filesystem::path& path) {
  write_file(path, encode_checkpoint(ckpt));
  std::ostringstream m;
  m << "format = uwarm-ddpg-checkpoint\n"
    << "version = " << kCheckpointVersion << '\n'
    << "seed = " << meta.seed << '\n'
    << "config_hash = 0x" << std::hex << std::setw(16) << std::setfill('0') << meta.config_hash
    << std::dec << '\n'
    << "epoch = " << meta.epoch << '\n'
    << "train_steps = " << ckpt.train_steps << '\n'
    << "actor_layers = ";
  for (std::size_t i = 0; i < ckpt.actor.layer_sizes.size(); ++i) {
    m << (i ? "," : "") << ckpt.actor.layer_sizes[i];
  }
  m << "\ncritic_layers = ";
  for (std::size_t i = 0; i < ckpt.critic.layer_sizes.size(); ++i) {
    m << (i ? "," : "") << ckpt.critic.layer_sizes[i];
  }
  m << '\n';
  write_file(meta_path(path), m.str());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(read_file(path));
}

CheckpointMeta load_checkpoint_meta(const std::filesystem::path& path) {
  std::istringstream in(read_file(meta_path(path)));
  CheckpointMeta meta;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 3);
    if (key == "seed") meta.seed = std::stoull(value);
    else if (key == "config_hash") meta.config_hash = std::stoull(value, nullptr, 16);
    else if (key == "epoch") meta.epoch = std::stoi(value);
  }
  return meta;
}

void restore(DdpgAgent& agent, const Checkpoint& ckpt) {
  agent.set_networks(ckpt.actor, ckpt.critic, ckpt.actor_target, ckpt.critic_target,
                     ckpt.train_steps);
}

MlpParams load_actor(const std::filesystem::path& path, const std::vector<int>& expected_sizes) {
  Checkpoint c = load_checkpoint(path);
  if (c.actor.layer_sizes != expected_sizes || c.actor.output_activation != Activation::kTanh) {
    throw Error(ErrorCode::kShapeMismatch, "checkpoint actor has a different layout");
  }
  return std::move(c.actor);
}

}  // namespace uwarm
