#include "treewalk/text.hpp"

#include <cctype>
#include <charconv>

namespace treewalk {

namespace {

class Cursor {
public:
  explicit Cursor(std::string_view s) : s_(s) {}

  void skip_ws()
  {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }

  bool peek(char c)
  {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  bool accept(char c)
  {
    if (!peek(c))
      return false;
    ++pos_;
    return true;
  }

  void expect(char c)
  {
    if (!accept(c))
      fail(std::string("expected '") + c + "'");
  }

  bool accept_word(std::string_view w)
  {
    skip_ws();
    if (s_.substr(pos_, w.size()) != w)
      return false;
    pos_ += w.size();
    return true;
  }

  void expect_word(std::string_view w)
  {
    if (!accept_word(w))
      fail("expected '" + std::string(w) + "'");
  }

  std::int64_t integer()
  {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+'))
      ++pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
    std::string_view tok = s_.substr(start, pos_ - start);
    if (!tok.empty() && tok[0] == '+')
      tok.remove_prefix(1);
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty())
      fail("expected an integer");
    return value;
  }

  std::uint32_t modulus()
  {
    std::int64_t q = integer();
    if (q < 2 || q > (1 << 20))
      fail("modulus out of range");
    expect(':');
    return static_cast<std::uint32_t>(q);
  }

  void finish()
  {
    skip_ws();
    if (pos_ != s_.size())
      fail("trailing characters");
  }

  [[noreturn]] void fail(const std::string &what) const
  {
    throw ParseError(what + " at offset " + std::to_string(pos_) + " in \"" + std::string(s_) + "\"");
  }

private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

Digits digit_body(Cursor &c, std::uint32_t q)
{
  Digits out(q);
  c.expect('{');
  if (c.accept('}'))
    return out;
  do {
    Index i = c.integer();
    c.expect(':');
    std::int64_t d = c.integer();
    if (d < 0 || d >= q)
      c.fail("digit out of range");
    if (out.at(i) != 0)
      c.fail("duplicate index");
    out.add_at(i, static_cast<Digit>(d));
  } while (c.accept(','));
  c.expect('}');
  return out;
}

// Accepts `{...}` or `q:{...}` with a matching modulus.
Digits digits_maybe_prefixed(Cursor &c, std::uint32_t q)
{
  if (!c.peek('{')) {
    if (c.modulus() != q)
      c.fail("inner modulus does not match");
  }
  return digit_body(c, q);
}

AffineElem affine(Cursor &c)
{
  std::uint32_t q = c.modulus();
  c.expect('(');
  Index n = c.integer();
  c.expect(';');
  Digits b = digits_maybe_prefixed(c, q);
  c.expect(')');
  return AffineElem(n, std::move(b));
}

} // namespace

Digits parse_digits(std::string_view text)
{
  Cursor c(text);
  std::uint32_t q = c.modulus();
  Digits out = digit_body(c, q);
  c.finish();
  return out;
}

Vertex parse_vertex(std::string_view text)
{
  Cursor c(text);
  std::uint32_t q = c.modulus();
  c.expect('(');
  Index k = c.integer();
  c.expect(';');
  Digits r = digits_maybe_prefixed(c, q);
  c.expect(')');
  c.finish();
  try {
    return Vertex(k, std::move(r));
  } catch (const std::invalid_argument &e) {
    throw ParseError(e.what());
  }
}

End parse_end(std::string_view text)
{
  Cursor c(text);
  std::uint32_t q = c.modulus();
  if (c.accept_word("omega")) {
    c.finish();
    return End::omega(q);
  }
  c.expect_word("stream");
  c.expect('(');
  c.expect_word("pre");
  c.expect('=');
  Digits pre = digits_maybe_prefixed(c, q);
  c.expect(',');
  c.expect_word("p");
  c.expect('=');
  Index p = c.integer();
  c.expect(',');
  c.expect_word("period");
  c.expect('=');
  c.expect('[');
  std::vector<Digit> period;
  if (!c.peek(']')) {
    do {
      std::int64_t d = c.integer();
      if (d < 0 || d >= q)
        c.fail("digit out of range");
      period.push_back(static_cast<Digit>(d));
    } while (c.accept(','));
  }
  c.expect(']');
  c.expect(')');
  c.finish();
  try {
    return End::stream(std::move(pre), p, std::move(period));
  } catch (const std::invalid_argument &e) {
    throw ParseError(e.what());
  }
}

AffineElem parse_affine(std::string_view text)
{
  Cursor c(text);
  AffineElem g = affine(c);
  c.finish();
  return g;
}

ProductElem parse_product(std::string_view text)
{
  Cursor c(text);
  ProductElem g;
  if (c.accept('[')) {
    do
      g.factors.push_back(affine(c));
    while (c.accept(','));
    c.expect(']');
  } else {
    g.factors.push_back(affine(c));
  }
  c.finish();
  return g;
}

Rational parse_rational(std::string_view text)
{
  Cursor c(text);
  auto trimmed = text;
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front())))
    trimmed.remove_prefix(1);
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
    trimmed.remove_suffix(1);

  if (auto dot = trimmed.find('.'); dot != std::string_view::npos) {
    std::string digits(trimmed.substr(0, dot));
    std::string frac(trimmed.substr(dot + 1));
    if (frac.empty() || frac.size() > 15 ||
        frac.find_first_not_of("0123456789") != std::string::npos)
      throw ParseError("malformed decimal \"" + std::string(text) + "\"");
    bool negative = !digits.empty() && digits[0] == '-';
    std::int64_t whole = digits.empty() || digits == "-" ? 0 : Cursor(digits).integer();
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i)
      scale *= 10;
    std::int64_t f = std::stoll(frac);
    Rational r(std::abs(whole) * scale + f, scale);
    return negative ? -r : r;
  }

  std::int64_t num = c.integer();
  std::int64_t den = 1;
  if (c.accept('/')) {
    den = c.integer();
    if (den == 0)
      c.fail("zero denominator");
  }
  c.finish();
  return Rational(num, den);
}

std::string to_string(const Rational &r)
{
  if (r.denominator() == 1)
    return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

} // namespace treewalk
