#pragma once

#include <cstddef>

#include "mlr/model.hpp"

namespace mlr {

// Source of fresh i.i.d.-style batches for the iterative stages.
class BatchSampler {
 public:
  virtual ~BatchSampler() = default;
  virtual Dataset draw(std::size_t m, Rng& rng) = 0;
  virtual Eigen::Index dim() const = 0;
  std::size_t samples_drawn() const { return drawn_; }

 protected:
  std::size_t drawn_ = 0;
};

// Generates fresh rows from a known model. Never exhausts.
class ModelSampler : public BatchSampler {
 public:
  explicit ModelSampler(const MixtureModel& model) : model_(&model) {}
  Dataset draw(std::size_t m, Rng& rng) override {
    drawn_ += m;
    return sample_dataset(*model_, m, rng).stripped();
  }
  Eigen::Index dim() const override { return model_->d; }

 private:
  const MixtureModel* model_;
};

// Subsamples rows without replacement within each call (rows may repeat
// across calls). Hidden component ids are stripped from the batches.
class DatasetSampler : public BatchSampler {
 public:
  explicit DatasetSampler(const Dataset& data);
  Dataset draw(std::size_t m, Rng& rng) override;
  Eigen::Index dim() const override { return data_->dim(); }

 private:
  const Dataset* data_;
  std::vector<std::size_t> scratch_;  // index pool for partial shuffles
};

}  // namespace mlr
