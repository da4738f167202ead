//! Oracles shared between test targets.

/// Two passes straight from the grammar: fold every `*` first, then fold
/// `+`/`-` left to right.
pub fn brute_force(expression: &str) -> i128 {
    let words: Vec<&str> = expression.split_whitespace().collect();
    let mut operands: Vec<i128> = vec![words[0].parse().unwrap()];
    let mut additive: Vec<&str> = Vec::new();
    for pair in words[1..].chunks(2) {
        let value: i128 = pair[1].parse().unwrap();
        if pair[0] == "*" {
            let last = operands.last_mut().unwrap();
            *last *= value;
        } else {
            additive.push(pair[0]);
            operands.push(value);
        }
    }
    let mut total = operands[0];
    for (op, value) in additive.iter().zip(&operands[1..]) {
        match *op {
            "+" => total += value,
            "-" => total -= value,
            other => panic!("unexpected operator {other}"),
        }
    }
    total
}
