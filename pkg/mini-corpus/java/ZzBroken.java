package demo.broken;

public class ZzBroken {
    public void dangling() {
        int x = 1;
}
