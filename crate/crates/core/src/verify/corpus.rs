//! Fixed libsvm parsing corpus: lines with their expected outcomes under the
//! numeric sign label map.

use crate::data::ParseErrorKind;
use crate::losses::Label;

pub struct ValidLine {
    pub text: &'static str,
    pub label: Label,
    pub features: &'static [(u32, f64)],
}

pub struct MalformedLine {
    pub text: &'static str,
    pub expected: fn() -> ParseErrorKind,
}

const P: Label = Label::Positive;
const N: Label = Label::Negative;

macro_rules! valid {
    ($($text:expr => $label:expr, [$(($i:expr, $v:expr)),*];)*) => {
        &[$(ValidLine { text: $text, label: $label, features: &[$(($i, $v)),*] }),*]
    };
}

pub const VALID: &[ValidLine] = valid! {
    "+1 3:0.5 7:1.2" => P, [(3, 0.5), (7, 1.2)];
    "-1" => N, [];
    "1 1:1" => P, [(1, 1.0)];
    "-1 1:-1" => N, [(1, -1.0)];
    "+1 1:0.25 2:0.5 3:0.75" => P, [(1, 0.25), (2, 0.5), (3, 0.75)];
    "0 4:2" => N, [(4, 2.0)];
    "2 10:3.5" => P, [(10, 3.5)];
    "-2 10:-3.5" => N, [(10, -3.5)];
    "+1 5:1e-3" => P, [(5, 1e-3)];
    "+1 5:1E3" => P, [(5, 1e3)];
    "-1 6:-2.5e+2" => N, [(6, -250.0)];
    "+1\t2:1\t4:2" => P, [(2, 1.0), (4, 2.0)];
    "+1  2:1   4:2  " => P, [(2, 1.0), (4, 2.0)];
    "+1 2:1 # trailing comment" => P, [(2, 1.0)];
    "-1 #comment where features would be" => N, [];
    "+1 1:0" => P, [(1, 0.0)];
    "+1 1:-0" => P, [(1, 0.0)];
    "+1 100:1" => P, [(100, 1.0)];
    "+1 4294967295:1" => P, [(4294967295, 1.0)];
    "1.0 1:1" => P, [(1, 1.0)];
    "+1 1:.5" => P, [(1, 0.5)];
    "+1 1:5." => P, [(1, 5.0)];
    "-1 2:+3" => N, [(2, 3.0)];
    "+1 1:1 2:2 3:3 4:4 5:5 6:6 7:7 8:8" => P,
        [(1, 1.0), (2, 2.0), (3, 3.0), (4, 4.0), (5, 5.0), (6, 6.0), (7, 7.0), (8, 8.0)];
    "-1 3:0.333333333333" => N, [(3, 0.333333333333)];
    "+1 1:1\r" => P, [(1, 1.0)];
    "-1 2:2\r" => N, [(2, 2.0)];
    "+1 7:1.5e-300" => P, [(7, 1.5e-300)];
    "-1 7:1.7976931348623157e308" => N, [(7, f64::MAX)];
    "+1 9:-0.0001" => P, [(9, -0.0001)];
    "-1 1:1 3:1 5:1 7:1 9:1" => N, [(1, 1.0), (3, 1.0), (5, 1.0), (7, 1.0), (9, 1.0)];
    "+1 2:2 20:20 200:200" => P, [(2, 2.0), (20, 20.0), (200, 200.0)];
    "+3 1:1" => P, [(1, 1.0)];
    "-0.5 1:1" => N, [(1, 1.0)];
    "+1 12:1#tight comment" => P, [(12, 1.0)];
    "  +1 1:2" => P, [(1, 2.0)];
    "-1 1:2 # 3:4 is commented out" => N, [(1, 2.0)];
    "+1 001:5" => P, [(1, 5.0)];
    "-1 2:007" => N, [(2, 7.0)];
    "+1 1:1e0" => P, [(1, 1.0)];
    "-1 15:-1e-5" => N, [(15, -1e-5)];
    "+1 3:2.5 4:-2.5" => P, [(3, 2.5), (4, -2.5)];
    "-1 8:0.125" => N, [(8, 0.125)];
    "+1 1:3.14159" => P, [(1, 3.14159)];
    "-1 1:-2.71828 2:1.41421" => N, [(1, -2.71828), (2, 1.41421)];
    "1e0 1:1" => P, [(1, 1.0)];
    "-1e0 2:1" => N, [(2, 1.0)];
    "+1 6:0.5 7:0.5 8:0.5" => P, [(6, 0.5), (7, 0.5), (8, 0.5)];
    "-1 11:11 12:12" => N, [(11, 11.0), (12, 12.0)];
    "+1 13:-13" => P, [(13, -13.0)];
};

macro_rules! malformed {
    ($($text:expr => $kind:expr;)*) => {
        &[$(MalformedLine { text: $text, expected: || $kind }),*]
    };
}

use ParseErrorKind as K;

pub const MALFORMED: &[MalformedLine] = malformed! {
    "1 2:a" => K::MalformedValue("a".into());
    "+1 1:2 3" => K::MalformedToken("3".into());
    "3:1.0" => K::EmptyLabel;
    "+1 0:1.0" => K::ZeroIndex;
    "+1 3:1 2:1" => K::NonIncreasingIndex { prev: 3, found: 2 };
    "+1 2:1 2:1" => K::NonIncreasingIndex { prev: 2, found: 2 };
    "+1 x:1" => K::MalformedIndex("x".into());
    "+1 -1:1" => K::MalformedIndex("-1".into());
    "+1 1.5:2" => K::MalformedIndex("1.5".into());
    "+1 1:nan" => K::NonFiniteValue("1:nan".into());
    "+1 1:inf" => K::NonFiniteValue("1:inf".into());
    "+1 1" => K::MalformedToken("1".into());
    "+1 1:" => K::MalformedValue("".into());
    "+1 :1" => K::MalformedIndex("".into());
    "cat 1:1" => K::UnknownLabel("cat".into());
    "+1 1:1e999" => K::NonFiniteValue("1:1e999".into());
    "+1 1:1:2" => K::MalformedValue("1:2".into());
    "+1 99999999999:1" => K::MalformedIndex("99999999999".into());
    "+1 4:1e-3 5:1..0" => K::MalformedValue("1..0".into());
    "+1 1:1,5" => K::MalformedValue("1,5".into());
};
