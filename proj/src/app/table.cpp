#include "fluxrabi/app/table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <tuple>

namespace fluxrabi::app {

void sort_rows(std::vector<Row>& rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        const bool sa = !a.phix.has_value(), sb = !b.phix.has_value();
        const double pa = a.phix.value_or(0.0), pb = b.phix.value_or(0.0);
        return std::tie(a.Lc, sb, pa, a.quantity, a.gauge, a.index) <
               std::tie(b.Lc, sa, pb, b.quantity, b.gauge, b.index);
    });
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", value);
    return buf;
}

std::string to_csv(std::vector<Row> rows) {
    sort_rows(rows);
    std::string out = "Lc_pH,Phix_Phi0,quantity,index,value,unit,gauge\n";
    for (const Row& r : rows) {
        out += format_number(r.Lc);
        out += ',';
        if (r.phix) out += format_number(*r.phix);
        out += ',' + r.quantity + ',' + std::to_string(r.index) + ',' + format_number(r.value) +
               ',' + r.unit + ',' + r.gauge + '\n';
    }
    return out;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f << text;
    f.close();
    if (!f) throw IoError("failed writing " + path);
}

}  // namespace fluxrabi::app
