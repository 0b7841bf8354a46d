#include "ects/model_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ects {
namespace {

constexpr const char* kMagic = "ects-model";
constexpr int kVersion = 1;

void write_doubles(std::ostream& out, const std::vector<double>& values) {
  for (double v : values) out << ' ' << format_double(v);
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error("model file " + path + ": " + what);
}

void expect_word(std::istream& in, const std::string& path, const std::string& word) {
  std::string tok;
  if (!(in >> tok) || tok != word) fail(path, "expected '" + word + "'");
}

template <typename T>
T read_value(std::istream& in, const std::string& path, const std::string& what) {
  T v{};
  if (!(in >> v)) fail(path, "truncated while reading " + what);
  return v;
}

}  // namespace

void save_model(const GammaModel& model, const std::string& path) {
  if (!model.chain) throw std::invalid_argument("cannot save a model without a chain");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file: " + path);

  const ClassifierChain& chain = *model.chain;
  const int n_ckpt = chain.checkpoint_count();

  out << kMagic << ' ' << kVersion << '\n';
  out << "series_length " << chain.series_length << '\n';
  out << "checkpoints " << n_ckpt;
  for (int c : chain.checkpoints) out << ' ' << c;
  out << '\n';

  for (int i = 0; i < n_ckpt; ++i) {
    const Standardizer& st = chain.standardizers[i];
    out << "standardizer " << i << ' ' << st.means.size();
    write_doubles(out, st.means);
    write_doubles(out, st.scales);
    out << '\n';
    const LogisticModel& lm = chain.models[i];
    out << "classifier " << i << ' ' << lm.weights().size();
    write_doubles(out, lm.weights());
    out << ' ' << format_double(lm.bias()) << '\n';
  }

  out << "groups " << model.group_count << ' ' << format_double(model.smoothing) << '\n';
  for (int i = 0; i < n_ckpt; ++i) {
    const auto& b = model.partition.boundaries[i];
    out << "partition " << i << ' ' << b.size();
    write_doubles(out, b);
    out << '\n';
  }
  for (int i = 0; i + 1 < n_ckpt; ++i) {
    const auto& m = model.transitions.matrices[i];
    out << "transition " << i << ' ' << m.size() << ' ' << m[0].size();
    for (const auto& row : m) write_doubles(out, row);
    out << '\n';
  }
  for (int i = 0; i < n_ckpt; ++i) {
    const int k = model.partition.group_count(i);
    for (int g = 0; g < k; ++g) {
      out << "priors " << i << ' ' << g;
      for (int y = 0; y < 2; ++y) out << ' ' << format_double(model.stats.priors[i][g][y]);
      out << '\n';
      out << "confusion " << i << ' ' << g;
      for (int y = 0; y < 2; ++y) {
        for (int p = 0; p < 2; ++p) {
          out << ' ' << format_double(model.stats.confusion[i][g][y][p]);
        }
      }
      out << '\n';
    }
  }
  for (int i = 0; i < n_ckpt; ++i) {
    for (std::size_t d = 0; d < model.stats.change[i].size(); ++d) {
      const int k = model.partition.group_count(i);
      for (int g = 0; g < k; ++g) {
        out << "change " << i << ' ' << d << ' ' << g;
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) {
            out << ' ' << format_double(model.stats.change[i][d][g][a][b]);
          }
        }
        out << '\n';
      }
    }
  }
  out << "end\n";
  if (!out) throw std::runtime_error("failed writing model file: " + path);
}

GammaModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);

  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kMagic) fail(path, "not a model file");
  if (version != kVersion) {
    fail(path, "unsupported version " + std::to_string(version));
  }

  auto chain = std::make_shared<ClassifierChain>();
  expect_word(in, path, "series_length");
  chain->series_length = read_value<int>(in, path, "series length");
  expect_word(in, path, "checkpoints");
  const int n_ckpt = read_value<int>(in, path, "checkpoint count");
  if (n_ckpt < 1) fail(path, "checkpoint count must be >= 1");
  chain->checkpoints.resize(n_ckpt);
  for (int i = 0; i < n_ckpt; ++i) {
    chain->checkpoints[i] = read_value<int>(in, path, "checkpoint");
  }
  chain->standardizers.resize(n_ckpt);
  chain->models.resize(n_ckpt);
  for (int i = 0; i < n_ckpt; ++i) {
    expect_word(in, path, "standardizer");
    if (read_value<int>(in, path, "standardizer index") != i) fail(path, "standardizer order");
    const int dim = read_value<int>(in, path, "feature count");
    Standardizer st;
    st.means.resize(dim);
    st.scales.resize(dim);
    for (double& v : st.means) v = read_value<double>(in, path, "standardizer mean");
    for (double& v : st.scales) v = read_value<double>(in, path, "standardizer scale");
    chain->standardizers[i] = std::move(st);

    expect_word(in, path, "classifier");
    if (read_value<int>(in, path, "classifier index") != i) fail(path, "classifier order");
    const int wdim = read_value<int>(in, path, "weight count");
    if (wdim != dim) fail(path, "weight/feature dimension mismatch");
    std::vector<double> weights(wdim);
    for (double& v : weights) v = read_value<double>(in, path, "weight");
    const double bias = read_value<double>(in, path, "bias");
    chain->models[i] = LogisticModel(std::move(weights), bias);
  }

  GammaModel model;
  model.chain = chain;
  expect_word(in, path, "groups");
  model.group_count = read_value<int>(in, path, "group count");
  model.smoothing = read_value<double>(in, path, "smoothing");
  if (model.group_count < 1) fail(path, "group count must be >= 1");

  model.partition.boundaries.resize(n_ckpt);
  for (int i = 0; i < n_ckpt; ++i) {
    expect_word(in, path, "partition");
    if (read_value<int>(in, path, "partition index") != i) fail(path, "partition order");
    const int m = read_value<int>(in, path, "boundary count");
    model.partition.boundaries[i].resize(m);
    for (double& v : model.partition.boundaries[i]) {
      v = read_value<double>(in, path, "boundary");
    }
  }
  model.transitions.matrices.resize(n_ckpt - 1);
  for (int i = 0; i + 1 < n_ckpt; ++i) {
    expect_word(in, path, "transition");
    if (read_value<int>(in, path, "transition index") != i) fail(path, "transition order");
    const int rows = read_value<int>(in, path, "transition rows");
    const int cols = read_value<int>(in, path, "transition cols");
    if (rows != model.partition.group_count(i) || cols != model.partition.group_count(i + 1)) {
      fail(path, "transition shape does not match the partition");
    }
    auto& m = model.transitions.matrices[i];
    m.assign(rows, std::vector<double>(cols, 0.0));
    for (auto& row : m) {
      for (double& v : row) v = read_value<double>(in, path, "transition entry");
    }
  }
  model.stats.priors.resize(n_ckpt);
  model.stats.confusion.resize(n_ckpt);
  for (int i = 0; i < n_ckpt; ++i) {
    const int k = model.partition.group_count(i);
    model.stats.priors[i].assign(k, {0.0, 0.0});
    model.stats.confusion[i].assign(k, {{{0.0, 0.0}, {0.0, 0.0}}});
    for (int g = 0; g < k; ++g) {
      expect_word(in, path, "priors");
      if (read_value<int>(in, path, "priors checkpoint") != i ||
          read_value<int>(in, path, "priors group") != g) {
        fail(path, "priors order");
      }
      for (int y = 0; y < 2; ++y) {
        model.stats.priors[i][g][y] = read_value<double>(in, path, "prior");
      }
      expect_word(in, path, "confusion");
      if (read_value<int>(in, path, "confusion checkpoint") != i ||
          read_value<int>(in, path, "confusion group") != g) {
        fail(path, "confusion order");
      }
      for (int y = 0; y < 2; ++y) {
        for (int p = 0; p < 2; ++p) {
          model.stats.confusion[i][g][y][p] = read_value<double>(in, path, "confusion entry");
        }
      }
    }
  }
  model.stats.change.resize(n_ckpt);
  for (int i = 0; i < n_ckpt; ++i) {
    model.stats.change[i].resize(n_ckpt - 1 - i);
    const int k = model.partition.group_count(i);
    for (int d = 0; d + i + 1 < n_ckpt; ++d) {
      model.stats.change[i][d].assign(k, {{{0.0, 0.0}, {0.0, 0.0}}});
      for (int g = 0; g < k; ++g) {
        expect_word(in, path, "change");
        if (read_value<int>(in, path, "change checkpoint") != i ||
            read_value<int>(in, path, "change horizon") != d ||
            read_value<int>(in, path, "change group") != g) {
          fail(path, "change order");
        }
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) {
            model.stats.change[i][d][g][a][b] = read_value<double>(in, path, "change entry");
          }
        }
      }
    }
  }
  expect_word(in, path, "end");
  return model;
}

}  // namespace ects
