//! Reproducible random streams keyed by simulation coordinates.

use onebit::stats::{gaussian_vector, rademacher_vector, Purpose, RngStream, StreamKey};

fn main() {
    let seed = 7;
    let key = StreamKey::new(Purpose::Noise)
        .experiment(1)
        .grid_index(3)
        .hypothesis(0)
        .replication(42)
        .machine(5);
    let stream = RngStream::from_key(seed, &key);

    let a = gaussian_vector(&stream, 4);
    let b = gaussian_vector(&stream, 4);
    assert_eq!(a, b);
    println!("noise of machine 5, replication 42: {a:.4?}");

    // a different purpose gives an unrelated sequence
    let coin = RngStream::from_key(seed, &StreamKey { purpose: Purpose::Coin, ..key });
    println!("coin stream:                       {:.4?}", gaussian_vector(&coin, 4));

    for i in 0..3 {
        println!("substream {i}: {:?}", rademacher_vector(&stream.substream(i), 8));
    }
}
