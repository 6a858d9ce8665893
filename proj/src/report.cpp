#include "atri/report.hpp"

#include <iomanip>
#include <sstream>

namespace atri {

namespace {

std::string fmt(double v) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(4) << v;
    return ss.str();
}

void render_rows(std::ostringstream& out, const BenchReport& report,
                 const BenchReport* compare) {
    out << std::left << std::setw(34) << "method" << std::right
        << std::setw(8) << "acc" << std::setw(8) << "ma_p" << std::setw(8)
        << "ma_r" << std::setw(8) << "ma_f" << std::setw(8) << "cs"
        << std::setw(7) << "n_yes" << std::setw(7) << "n_no" << std::setw(10)
        << "n_invalid";
    if (compare)
        out << std::setw(10) << "acc(B)" << std::setw(10) << "ma_f(B)";
    out << "\n";
    for (const auto& [method, m] : report.overall) {
        out << std::left << std::setw(34) << method << std::right
            << std::setw(8) << fmt(m.acc) << std::setw(8) << fmt(m.ma_p)
            << std::setw(8) << fmt(m.ma_r) << std::setw(8) << fmt(m.ma_f)
            << std::setw(8) << fmt(m.mean_cs_with_zeros) << std::setw(7)
            << m.n_yes << std::setw(7) << m.n_no << std::setw(10)
            << m.n_invalid;
        if (compare) {
            auto it = compare->overall.find(method);
            if (it != compare->overall.end())
                out << std::setw(10) << fmt(it->second.acc) << std::setw(10)
                    << fmt(it->second.ma_f);
            else
                out << std::setw(10) << "-" << std::setw(10) << "-";
        }
        out << "\n";
    }
}

}  // namespace

std::string render_report_text(const BenchReport& report,
                               const BenchReport* compare) {
    std::ostringstream out;
    out << "== overall ==\n";
    render_rows(out, report, compare);
    for (const auto& [cid, methods] : report.per_concept) {
        out << "\n== concept " << cid << " ==\n";
        BenchReport sub;
        sub.overall = methods;
        const BenchReport* csub = nullptr;
        BenchReport cmp_sub;
        if (compare) {
            auto it = compare->per_concept.find(cid);
            if (it != compare->per_concept.end()) {
                cmp_sub.overall = it->second;
                csub = &cmp_sub;
            }
        }
        render_rows(out, sub, csub);
    }
    return out.str();
}

std::string render_report_csv(const BenchReport& report) {
    std::ostringstream out;
    out << "method,acc,ma_p,ma_r,ma_f,cs,n_yes,n_no,n_invalid\n";
    for (const auto& [method, m] : report.overall) {
        out << method << "," << fmt(m.acc) << "," << fmt(m.ma_p) << ","
            << fmt(m.ma_r) << "," << fmt(m.ma_f) << ","
            << fmt(m.mean_cs_with_zeros) << "," << m.n_yes << "," << m.n_no
            << "," << m.n_invalid << "\n";
    }
    return out.str();
}

}  // namespace atri
