#ifndef PANELCUSUM_TESTS_HELPERS_HPP_
#define PANELCUSUM_TESTS_HELPERS_HPP_

#include <vector>

#include "panelcusum/core.hpp"
#include "support/oracles.hpp"

namespace testing_support {

inline panelcusum::Matrix to_matrix(const oracle::Rows &rows) {
  panelcusum::Matrix m(static_cast<panelcusum::Index>(rows.size()),
                       static_cast<panelcusum::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t t = 0; t < rows[i].size(); ++t) {
      m(static_cast<panelcusum::Index>(i), static_cast<panelcusum::Index>(t)) =
          rows[i][t];
    }
  }
  return m;
}

inline oracle::Rows to_rows(const panelcusum::Matrix &m) {
  oracle::Rows rows(static_cast<std::size_t>(m.rows()));
  for (panelcusum::Index i = 0; i < m.rows(); ++i) {
    rows[static_cast<std::size_t>(i)].assign(m.row(i).data(),
                                             m.row(i).data() + m.cols());
  }
  return rows;
}

inline panelcusum::PanelData panel_of(const oracle::Rows &rows) {
  return panelcusum::validate_panel(to_matrix(rows));
}

inline std::vector<double> row_vector(const panelcusum::Matrix &m,
                                      panelcusum::Index i) {
  return {m.row(i).data(), m.row(i).data() + m.cols()};
}

}  // namespace testing_support

#endif  // PANELCUSUM_TESTS_HELPERS_HPP_
