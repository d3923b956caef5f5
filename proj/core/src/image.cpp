#include "evlec/image.hpp"

#include "evlec/errors.hpp"

#include <fstream>
#include <istream>

namespace evlec {

namespace {

// Skips whitespace and '#' comments between PGM header tokens.
int next_header_int(std::istream& in, const std::string& name) {
    int c = in.peek();
    while (c == '#' || std::isspace(c)) {
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else {
            in.get();
        }
        c = in.peek();
    }
    int value = -1;
    if (!(in >> value) || value < 0)
        throw io_error(name + ": bad PGM header");
    return value;
}

} // namespace

image8 read_pgm(std::istream& in, const std::string& name) {
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (!in || m0 != 'P' || m1 != '5')
        throw io_error(name + ": not a binary PGM (P5) file");

    const int width = next_header_int(in, name);
    const int height = next_header_int(in, name);
    const int maxval = next_header_int(in, name);
    if (maxval <= 0 || maxval > 255)
        throw io_error(name + ": only 8-bit PGM supported (maxval " + std::to_string(maxval) + ")");
    in.get(); // single whitespace byte after maxval

    image8 img(width, height);
    in.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (static_cast<std::size_t>(in.gcount()) != img.pixels.size())
        throw io_error(name + ": truncated PGM pixel data");
    return img;
}

image8 read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open " + path.string());
    return read_pgm(in, path.string());
}

void write_pgm(const image8& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io_error("cannot create " + path.string());
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
    if (!out)
        throw io_error("short write to " + path.string());
}

} // namespace evlec
