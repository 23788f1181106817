#pragma once

#include <string>
#include <vector>

#include "rccm/linalg.hpp"

namespace rccm {

// One subject's processed observations (rows are time points) together with
// its sample covariance (1/n) X'X of the processed data.
struct ObservationMatrix {
  Matrix data;
  Matrix sample_cov;
  int n() const { return static_cast<int>(data.rows()); }
};

struct TimeSeriesPanel {
  std::vector<ObservationMatrix> subjects;
  std::vector<std::string> roi_names;
  int p = 0;
  bool standardized = false;
  int num_subjects() const { return static_cast<int>(subjects.size()); }
};

// Column-centers each subject (and scales to unit sample variance when
// standardize is set), then caches sample covariances. All subjects must share
// the column count; every subject needs at least two rows. A zero-variance
// column under scaling raises DegenerateColumnError. Subject indices in
// errors are 1-based, matching file naming.
TimeSeriesPanel build_panel(const std::vector<Matrix>& raw, bool standardize,
                            std::vector<std::string> roi_names = {});

}  // namespace rccm
