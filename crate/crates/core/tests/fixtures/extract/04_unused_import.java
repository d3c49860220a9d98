import java.io.File;
public int count() {
    int x = 1;
    return x;
}
