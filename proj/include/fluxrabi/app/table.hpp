#pragma once

// Long-format result table shared by every CLI task.
// Columns: Lc_pH, Phix_Phi0, quantity, index, value, unit, gauge.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fluxrabi::app {

struct Row {
    double Lc = 0.0;                 // pH
    std::optional<double> phix;      // Phi0; empty for per-circuit scalars
    std::string quantity;
    int index = 0;
    double value = 0.0;
    std::string unit;
    std::string gauge;               // "flux", "charge" or "" when gauge-free
};

/// Rows sorted by (Lc, Phix [scalars first], quantity, gauge, index).
void sort_rows(std::vector<Row>& rows);

/// 17 significant digits in scientific notation; "nan", "inf", "-inf" otherwise.
std::string format_number(double value);

/// Whole CSV document including the header line.
std::string to_csv(std::vector<Row> rows);

/// Writes `text` to `path`; throws IoError on failure.
void write_file(const std::string& path, const std::string& text);

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fluxrabi::app
