fn main() {
    use std::time::Instant;
    use num_complex::Complex64;
    use rustfft::FftDirection;
    let shape = [2048usize, 4096];
    let total: usize = shape.iter().product();
    let mut data: Vec<Complex64> = (0..total).map(|j| Complex64::new((j % 17) as f64, 0.1)).collect();
    // warm up plans
    wglab::fourier::fft_nd(&mut data, &shape, FftDirection::Forward, wglab::par::ExecMode::Parallel);
    let t0 = Instant::now();
    for _ in 0..5 {
        wglab::fourier::fft_nd(&mut data, &shape, FftDirection::Forward, wglab::par::ExecMode::Parallel);
        wglab::fourier::fft_nd(&mut data, &shape, FftDirection::Inverse, wglab::par::ExecMode::Parallel);
    }
    println!("per fwd+inv pair: {:?}", t0.elapsed() / 5);
}
