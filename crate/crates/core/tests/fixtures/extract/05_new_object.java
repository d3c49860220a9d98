import java.util.ArrayList;
import java.util.List;
public List<String> names(String prefix) {
    List<String> out = new ArrayList<>();
    out.add(prefix);
    return out;
}
