package demo.motion;

import us.ihmc.commons.MathTools;

public class TrajectoryCheck {
    public void initialize(double trajectoryTime) {
        MathTools.checkIntervalContains(trajectoryTime, 0.0, Double.POSITIVE_INFINITY);
        MathTools.clamp(trajectoryTime, 1.0);
    }
}
