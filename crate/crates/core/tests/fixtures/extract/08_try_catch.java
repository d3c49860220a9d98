import java.io.IOException;
import java.nio.file.Files;
import java.nio.file.Path;
public String readText(Path path) {
    String text = null;
    try {
        text = Files.readString(path);
    } catch (IOException error) {
        log(error);
    }
    return text;
}
