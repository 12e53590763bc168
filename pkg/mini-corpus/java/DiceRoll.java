package demo.game;

import java.util.Random;

public class DiceRoll {
    public static int roll(long seed) {
        Random rng = new Random(seed);
        return rng.nextInt(6) + 1;
    }
}
