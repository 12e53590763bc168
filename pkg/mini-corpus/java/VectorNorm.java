package demo.math;

import com.acme.vec.VecOps;

public class VectorNorm {
    public static double farthest(double[] deltas) {
        double best = VecOps.magnitude(deltas);
        return VecOps.scale(best, 2.0);
    }
}
