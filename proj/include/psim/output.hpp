#ifndef PSIM_OUTPUT_HPP
#define PSIM_OUTPUT_HPP

#include <string>
#include <vector>

#include "psim/linalg.hpp"

namespace psim {

inline constexpr const char* kToolName = "pointer-sim";
inline constexpr const char* kToolVersion = "0.1.0";

/// Locale-independent decimal rendering, 17 significant digits.
std::string format_number(double v);

/// CSV buffer with a fixed column schema declared in a leading comment
/// line. Text is accumulated in memory and written atomically.
class CsvWriter {
public:
    CsvWriter(std::vector<std::string> columns, const std::string& input_hash);

    void begin_row();
    void add(double v);
    void add(const std::string& v);
    void add(cxd v); // two cells: re, im
    void end_row();

    std::string str() const;

private:
    size_t n_columns_;
    size_t cells_in_row_ = 0;
    bool in_row_ = false;
    std::string buffer_;
};

/// Writes via a temp file + rename so failures never leave partial files.
void atomic_write_file(const std::string& path, const std::string& content);

void ensure_directory(const std::string& path);

std::string sha256_hex(const std::string& bytes);

} // namespace psim

#endif
