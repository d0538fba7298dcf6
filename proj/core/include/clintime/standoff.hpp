#ifndef CLINTIME_STANDOFF_HPP
#define CLINTIME_STANDOFF_HPP

#include <iosfwd>
#include <string>

#include "clintime/types.hpp"

namespace clintime::standoff {

// Standoff file format, one document per file:
//
//   #DOC <id>
//   #META <key>=<value>
//   #TEXT <n-lines>
//   <raw text, exactly n lines>
//   E<k>\tEVENT\t<category>\t<start>\t<end>\t<negated>\t<surface>
//   T<k>\tTIMEX\t<type>\t<start>\t<end>\t<value>\t<modifier>\t<surface>
//   L<k>\tTLINK\t<sourceId>\t<targetId>\t<relation>\t<origin>
//
// Offsets are code-point offsets. The surface column is the exact document
// slice at the span (tabs/newlines/backslashes escaped) and is re-checked
// on read.

AnnotatedDocument read(std::istream& in);
AnnotatedDocument read_file(const std::string& path);

// Canonical form: annotations sorted by (start, end, id), links by
// (source, target, id), LF line endings.
void write(const AnnotatedDocument& doc, std::ostream& out);
void write_file(const AnnotatedDocument& doc, const std::string& path);
std::string to_string(const AnnotatedDocument& doc);

// Checks the AnnotatedDocument invariants (span ranges, unique ids,
// resolvable link anchors). Throws ValidationError.
void validate(const AnnotatedDocument& doc);

std::string escape_field(const std::string& s);
std::string unescape_field(const std::string& s);

}  // namespace clintime::standoff

#endif
