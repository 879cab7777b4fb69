#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "vcd/frame.hpp"

namespace vcd {

// YUV4MPEG2. Only the luma plane is kept; chroma is skipped. Supported
// colorspaces: mono, 420, 420jpeg, 420paldv, 420mpeg2, 422, 444 (8-bit).
Video read_y4m(std::istream& in);
Video read_y4m(const std::filesystem::path& path);
void write_y4m(const Video& video, std::ostream& out);
void write_y4m(const Video& video, const std::filesystem::path& path);

// Binary PGM ("P5"), one frame per file, samples mapped v/maxval.
GrayFrame read_pgm(std::istream& in);
Video read_pgm_sequence(std::span<const std::filesystem::path> files, Fps fps);
void write_pgm(const GrayFrame& frame, std::ostream& out);
std::vector<std::filesystem::path> write_pgm_sequence(const Video& video,
                                                      const std::filesystem::path& directory);

// Dispatches on the argument: a .y4m file, a directory of .pgm files, a
// glob pattern matching .pgm files, or a text list (.txt/.lst) of .pgm paths.
// pgm_fps is only consulted for PGM input.
Video read_video(const std::string& source, Fps pgm_fps = Fps(8));

// Sorted matches of a shell glob pattern; a non-pattern path is returned as-is
// when it exists.
std::vector<std::filesystem::path> expand_glob(const std::string& pattern);

}  // namespace vcd
