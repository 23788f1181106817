#include "rccm/panel.hpp"

#include <cmath>

namespace rccm {

TimeSeriesPanel build_panel(const std::vector<Matrix>& raw, bool standardize,
                            std::vector<std::string> roi_names) {
  if (raw.empty()) throw InvalidInputError("panel needs at least one subject");
  const int p = static_cast<int>(raw.front().cols());
  if (p < 1) throw InvalidInputError("subjects need at least one column");

  TimeSeriesPanel panel;
  panel.p = p;
  panel.standardized = standardize;
  if (roi_names.empty()) {
    for (int j = 1; j <= p; ++j) roi_names.push_back("V" + std::to_string(j));
  }
  if (static_cast<int>(roi_names.size()) != p)
    throw InvalidInputError("name list length must match column count");
  panel.roi_names = std::move(roi_names);

  panel.subjects.reserve(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    const Matrix& x = raw[k];
    if (static_cast<int>(x.cols()) != p)
      throw InvalidInputError("subject " + std::to_string(k + 1) +
                              " has a mismatched column count");
    const int n = static_cast<int>(x.rows());
    if (n < 2)
      throw InvalidInputError("subject " + std::to_string(k + 1) +
                              " needs at least two observations");

    Matrix centered = x.rowwise() - x.colwise().mean();
    if (standardize) {
      for (int j = 0; j < p; ++j) {
        const double sd =
            std::sqrt(centered.col(j).squaredNorm() / (n - 1));
        if (!(sd > 0.0))
          throw DegenerateColumnError(static_cast<int>(k + 1), j + 1);
        centered.col(j) /= sd;
      }
    }

    ObservationMatrix subject;
    subject.sample_cov = (centered.transpose() * centered) / n;
    subject.data = std::move(centered);
    panel.subjects.push_back(std::move(subject));
  }
  return panel;
}

}  // namespace rccm
